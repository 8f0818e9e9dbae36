use std::ffi::{c_char, CStr, CString};
use std::ptr;

use lpaclass_ffi::*;

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { lpa_string_free(p) };
    s
}

fn last_error() -> Option<String> {
    let p = lpa_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

fn builtin(name: &str, params: &[i64]) -> *mut LpaGraph {
    let name = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    let status = unsafe { lpa_graph_builtin(name.as_ptr(), params.as_ptr(), params.len(), &mut g) };
    assert_eq!(status, LpaStatus::Ok, "{:?}", last_error());
    g
}

#[test]
fn graph_round_trip_and_queries() {
    let json = CString::new(r#"{"vertices":["a","b"],"edges":[["a","a",1],["a","b",1],["b","a",1]]}"#).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lpa_graph_from_json(json.as_ptr(), &mut g) }, LpaStatus::Ok);

    let mut n = 0usize;
    assert_eq!(unsafe { lpa_graph_vertex_count(g, &mut n) }, LpaStatus::Ok);
    assert_eq!(n, 2);

    let mut pis = false;
    assert_eq!(unsafe { lpa_graph_is_purely_infinite_simple(g, &mut pis) }, LpaStatus::Ok);
    assert!(pis);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { lpa_graph_to_json(g, &mut out) }, LpaStatus::Ok);
    assert_eq!(take_string(out), json.to_str().unwrap());

    assert_eq!(unsafe { lpa_graph_analyze_json(g, &mut out) }, LpaStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["condition_Sing"], true);
    assert!(last_error().is_none());
    unsafe { lpa_graph_free(g) };
}

#[test]
fn k0_and_pointed_iso() {
    let rose = builtin("R_n", &[6]);
    let tail = builtin("R_n_k", &[6, 3]);
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(lpa_graph_k0_json(rose, &mut a), LpaStatus::Ok);
        assert_eq!(lpa_graph_k0_json(tail, &mut b), LpaStatus::Ok);
    }
    let (a, b) = (take_string(a), take_string(b));
    assert_eq!(a, r#"{"rank":0,"factors":[5],"unit":[1]}"#);
    let (ca, cb) = (CString::new(a).unwrap(), CString::new(b).unwrap());
    let mut iso = false;
    assert_eq!(unsafe { lpa_k0_pointed_iso(ca.as_ptr(), cb.as_ptr(), &mut iso) }, LpaStatus::Ok);
    assert!(iso);
    let zero = CString::new(r#"{"rank":0,"factors":[5],"unit":[0]}"#).unwrap();
    assert_eq!(unsafe { lpa_k0_pointed_iso(ca.as_ptr(), zero.as_ptr(), &mut iso) }, LpaStatus::Ok);
    assert!(!iso);
    unsafe {
        lpa_graph_free(rose);
        lpa_graph_free(tail);
    }
}

#[test]
fn certify_and_verify() {
    let mut cert = ptr::null_mut();
    assert_eq!(unsafe { lpa_certify_fish(8, 3, &mut cert) }, LpaStatus::Ok);
    let cert = CString::new(take_string(cert)).unwrap();
    let (mut valid, mut report) = (false, ptr::null_mut());
    assert_eq!(
        unsafe { lpa_verify_certificate_json(cert.as_ptr(), false, &mut valid, &mut report) },
        LpaStatus::Ok
    );
    assert!(valid);
    assert!(take_string(report).contains("\"valid\":true"));
    // the report is optional
    assert_eq!(
        unsafe { lpa_verify_certificate_json(cert.as_ptr(), false, &mut valid, ptr::null_mut()) },
        LpaStatus::Ok
    );
}

#[test]
fn error_codes_and_messages() {
    let mut cert = ptr::null_mut();
    assert_eq!(unsafe { lpa_certify_fish(3, 2, &mut cert) }, LpaStatus::PreconditionFailed);
    assert!(cert.is_null());
    assert!(last_error().unwrap().contains("gcd"));

    let bad = CString::new("{\"vertices\": 3}").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lpa_graph_from_json(bad.as_ptr(), &mut g) }, LpaStatus::ParseError);
    assert_eq!(unsafe { lpa_graph_from_json(ptr::null(), &mut g) }, LpaStatus::NullPointer);
    let unknown = CString::new(r#"{"vertices":["a"],"edges":[["a","z",1]]}"#).unwrap();
    assert_eq!(unsafe { lpa_graph_from_json(unknown.as_ptr(), &mut g) }, LpaStatus::InvalidArgument);

    let mut n = 0usize;
    assert_eq!(unsafe { lpa_graph_vertex_count(ptr::null(), &mut n) }, LpaStatus::NullPointer);
    let name = CString::new("R_n").unwrap();
    assert_eq!(
        unsafe { lpa_graph_builtin(name.as_ptr(), ptr::null(), 1, &mut g) },
        LpaStatus::NullPointer
    );

    let big = builtin("R_n", &[3]);
    assert_eq!(unsafe { lpa_graph_vertex_count(big, ptr::null_mut()) }, LpaStatus::NullPointer);
    unsafe { lpa_graph_free(big) };

    // success clears the message
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { lpa_certify_fish(4, 2, &mut c) }, LpaStatus::Ok);
    take_string(c);
    assert!(last_error().is_none());

    unsafe {
        lpa_graph_free(ptr::null_mut());
        lpa_string_free(ptr::null_mut());
    }
}

#[test]
fn status_names() {
    let name = |code| unsafe { CStr::from_ptr(lpa_status_name(code)) }.to_str().unwrap();
    assert_eq!(name(LpaStatus::Ok as i32), "ok");
    assert_eq!(name(LpaStatus::CapExceeded as i32), "cap exceeded");
    assert_eq!(name(42), "unknown status");
}
