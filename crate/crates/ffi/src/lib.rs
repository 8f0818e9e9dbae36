//! C ABI over `lpaclass`.
//!
//! Every fallible function returns an [`LpaStatus`] and writes its result
//! through an out-pointer. On failure a description is available from
//! [`lpa_last_error_message`] on the same thread. Strings handed out by the
//! library are NUL-terminated UTF-8 and must be released with
//! [`lpa_string_free`]; graph handles with [`lpa_graph_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lpaclass::{
    cert_fish, k0_data, parse_graph, pointed_iso, verify_certificate, Error, MoveCertificate, MultiGraph, PointedK0,
};

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    PreconditionFailed = 5,
    CapExceeded = 6,
    Overflow = 7,
    ConstructionFailed = 8,
    Panic = 9,
}

/// Opaque graph handle.
pub struct LpaGraph {
    inner: MultiGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LpaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Json(_) => LpaStatus::ParseError,
            Error::NotApplicable(_) | Error::Precondition(_) => LpaStatus::PreconditionFailed,
            Error::CapExceeded { .. } => LpaStatus::CapExceeded,
            Error::Overflow(_) => LpaStatus::Overflow,
            Error::Construction(_) => LpaStatus::ConstructionFailed,
            _ => LpaStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(LpaStatus::ParseError, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LpaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            LpaStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            LpaStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(LpaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LpaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_graph<'a>(g: *const LpaGraph) -> Result<&'a MultiGraph, Failure> {
    g.as_ref().map(|h| &h.inner).ok_or_else(|| null("graph"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|_| Failure(LpaStatus::InvalidArgument, "output contains NUL".into()))?;
    write_out(out, c.into_raw(), "output pointer")
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("library types serialize")
}

/// Parses graph JSON into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_from_json(json: *const c_char, out: *mut *mut LpaGraph) -> LpaStatus {
    guard(|| {
        let g = parse_graph(read_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(LpaGraph { inner: g })), "out")
    })
}

/// Builds a named family member (`R_n`, `R_n_k`, `A_n_k`, `B_n_k`,
/// `R2_hat`, `S2`) from `len` integer parameters.
///
/// # Safety
/// `name` must be NUL-terminated, `params` must point to `len` integers
/// (or be null when `len` is 0) and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_builtin(
    name: *const c_char,
    params: *const i64,
    len: usize,
    out: *mut *mut LpaGraph,
) -> LpaStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let params = if len == 0 {
            &[][..]
        } else if params.is_null() {
            return Err(null("params"));
        } else {
            std::slice::from_raw_parts(params, len)
        };
        let g = MultiGraph::builtin(name, params)?;
        write_out(out, Box::into_raw(Box::new(LpaGraph { inner: g })), "out")
    })
}

/// Releases a graph handle. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_free(g: *mut LpaGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_vertex_count(g: *const LpaGraph, out: *mut usize) -> LpaStatus {
    guard(|| write_out(out, read_graph(g)?.vertex_count(), "out"))
}

/// Graph JSON, to be released with [`lpa_string_free`].
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_to_json(g: *const LpaGraph, out: *mut *mut c_char) -> LpaStatus {
    guard(|| write_string(out, to_json(read_graph(g)?)))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lpa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Property report as JSON.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_analyze_json(g: *const LpaGraph, out: *mut *mut c_char) -> LpaStatus {
    guard(|| write_string(out, to_json(&read_graph(g)?.analyze())))
}

/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_is_purely_infinite_simple(g: *const LpaGraph, out: *mut bool) -> LpaStatus {
    guard(|| write_out(out, read_graph(g)?.is_purely_infinite_simple(), "out"))
}

/// Pointed K0 data as `{"rank", "factors", "unit"}` JSON.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_k0_json(g: *const LpaGraph, out: *mut *mut c_char) -> LpaStatus {
    guard(|| write_string(out, to_json(&k0_data(read_graph(g)?)?)))
}

/// Decides whether two pointed K0 values (JSON as produced by
/// [`lpa_graph_k0_json`]) are isomorphic.
///
/// # Safety
/// Both strings must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_k0_pointed_iso(a: *const c_char, b: *const c_char, out: *mut bool) -> LpaStatus {
    guard(|| {
        let a: PointedK0 = serde_json::from_str(read_str(a, "a")?)?;
        let b: PointedK0 = serde_json::from_str(read_str(b, "b")?)?;
        let a = PointedK0::new(a.group, a.unit)?;
        let b = PointedK0::new(b.group, b.unit)?;
        write_out(out, pointed_iso(&a, &b)?, "out")
    })
}

/// Certificate JSON for the rose with a `d`-tail reducing to the rose with
/// `n` petals, when gcd(d, n - 1) = 1.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_certify_fish(n: i64, d: i64, out: *mut *mut c_char) -> LpaStatus {
    guard(|| write_string(out, to_json(&cert_fish(n, d)?)))
}

/// Replays a certificate. Writes the verification report JSON to
/// `out_report` (may be null) and its verdict to `out_valid`. An invalid
/// certificate is not an error.
///
/// # Safety
/// `cert` must be NUL-terminated; `out_valid` valid; `out_report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn lpa_verify_certificate_json(
    cert: *const c_char,
    allow_infinite_field: bool,
    out_valid: *mut bool,
    out_report: *mut *mut c_char,
) -> LpaStatus {
    guard(|| {
        let cert: MoveCertificate = serde_json::from_str(read_str(cert, "cert")?)?;
        let report = verify_certificate(&cert, allow_infinite_field);
        write_out(out_valid, report.valid, "out_valid")?;
        if !out_report.is_null() {
            write_string(out_report, to_json(&report))?;
        }
        Ok(())
    })
}

/// Message for the most recent failure on this thread, or null when the
/// last call succeeded. Owned by the library; valid until the next call.
#[no_mangle]
pub extern "C" fn lpa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code; unknown codes get a generic text.
#[no_mangle]
pub extern "C" fn lpa_status_name(status: c_int) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer",
        2 => c"invalid UTF-8",
        3 => c"parse error",
        4 => c"invalid argument",
        5 => c"precondition failed",
        6 => c"cap exceeded",
        7 => c"overflow",
        8 => c"construction failed",
        9 => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}
