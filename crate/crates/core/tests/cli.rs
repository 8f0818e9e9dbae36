use std::path::PathBuf;

use lpaclass::cli::run;
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
fn lpaclass(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["lpaclass"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"))
}

fn golden(args: &[&str], file: &str) {
    let (code, out, _) = lpaclass(args, "");
    assert_eq!(code, 0, "{out}");
    let expected = std::fs::read_to_string(data(file)).unwrap();
    assert_eq!(out, expected, "output of {args:?} drifted from {file}");
}

#[test]
fn golden_outputs() {
    golden(&["k0", &data("e16.json")], "e16.k0.golden");
    golden(&["snf", &data("matrix.json")], "matrix.snf.golden");
    golden(&["certify", "divides", "--n", "4", "--k", "2"], "divides_4_2.golden");
    golden(&["classify", "--vertices", "2"], "classify_2.golden");
}

#[test]
fn k0_of_triangle() {
    let (code, out, _) = lpaclass(&["k0", &data("e16.json")], "");
    assert_eq!(code, 0);
    assert_eq!(json(&out), json(r#"{"rank":0,"factors":[2,2],"unit":[0,0]}"#));
}

#[test]
fn analyze_rose_with_tail_from_stdin() {
    let (_, graph, _) = lpaclass(&["builtin", "R_n_k", "2", "2"], "");
    let (code, out, _) = lpaclass(&["analyze", "-"], &graph);
    assert_eq!(code, 0);
    let report = json(&out);
    assert_eq!(report["purely_infinite_simple"], true);
    assert_eq!(report["condition_Sing"], false);
    assert_eq!(report["sources"], json(r#"["v2"]"#));
}

#[test]
fn certify_then_verify() {
    for args in [
        vec!["certify", "fish", "--n", "8", "--d", "3"],
        vec!["certify", "stabilize", "--n", "3", "--k", "2", "--t", "2"],
        vec!["certify", "open-tails", "--n", "3", "--k", "4"],
    ] {
        let (code, cert, _) = lpaclass(&args, "");
        assert_eq!(code, 0, "{cert}");
        let (code, out, _) = lpaclass(&["verify", "-"], &cert);
        assert_eq!(code, 0, "{args:?}: {out}");
        assert_eq!(json(&out)["valid"], true);
    }
}

#[test]
fn moves_emit_verifiable_certificates() {
    let (_, s2, _) = lpaclass(&["builtin", "S2"], "");
    let cases: [&[&str]; 4] = [
        &["move", "shift", "-", "--v", "v1", "--w", "v2"],
        &["move", "outsplit", "-", "--partition", r#"{"vertex":"v1","classes":[{"v1":1},{"v2":1}]}"#],
        &["move", "maxsplit", "-"],
        &["certify", "remove-sources", "-"],
    ];
    for args in cases {
        let (code, cert, _) = lpaclass(args, &s2);
        assert_eq!(code, 0, "{args:?}: {cert}");
        let (code, out, _) = lpaclass(&["verify", "-"], &cert);
        assert_eq!((code, json(&out)["valid"].clone()), (0, Value::Bool(true)), "{args:?}");
    }
}

#[test]
fn find_path_and_mismatch() {
    let (_, s2, _) = lpaclass(&["builtin", "S2"], "");
    let dir = std::env::temp_dir().join(format!("lpaclass-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    };
    let (_, r22, _) = lpaclass(&["builtin", "R_n_k", "2", "2"], "");
    let (_, r3, _) = lpaclass(&["builtin", "R_n", "3"], "");
    let (a, b, c) = (write("s2.json", &s2), write("r22.json", &r22), write("r3.json", &r3));
    let bounds = ["--max-vertices", "3", "--max-mult", "3", "--max-steps", "4"];

    let (code, cert, _) = lpaclass(&[&["find-path", a.as_str(), b.as_str()][..], &bounds].concat(), "");
    assert_eq!(code, 0);
    assert_eq!(json(&cert)["steps"].as_array().unwrap().len(), 1);
    let (code, _, _) = lpaclass(&["verify", "-"], &cert);
    assert_eq!(code, 0);

    let (code, out, _) = lpaclass(&[&["find-path", a.as_str(), c.as_str()][..], &bounds].concat(), "");
    assert_eq!(code, 0);
    assert_eq!(json(&out), json(r#"{"found":false,"reason":"invariant mismatch"}"#));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn tampered_certificate_fails_verification() {
    let (_, cert, _) = lpaclass(&["certify", "divides", "--n", "4", "--k", "2"], "");
    let mut value = json(&cert);
    value["steps"].as_array_mut().unwrap().pop();
    let (code, out, _) = lpaclass(&["verify", "-"], &value.to_string());
    assert_eq!(code, 1);
    let report = json(&out);
    assert_eq!(report["valid"], false);
    assert_eq!(report["failures"][0]["check"], "endpoint");
}

#[test]
fn domain_errors_exit_one_with_json() {
    for (args, stdin) in [
        (vec!["k0", "-"], "{\"vertices\": [\"a\"], \"edges\": [], \"extra\": 1}"),
        (vec!["certify", "fish", "--n", "3", "--d", "2"], ""),
        (vec!["enumerate", "--vertices", "5"], ""),
        (vec!["k0", "/nonexistent/graph.json"], ""),
        (vec!["move", "outsplit", "-", "--partition", "not json"], "{\"vertices\":[\"a\"],\"edges\":[[\"a\",\"a\",2]]}"),
    ] {
        let (code, out, _) = lpaclass(&args, stdin);
        assert_eq!(code, 1, "{args:?}: {out}");
        assert!(json(&out)["error"].is_string(), "{args:?}: {out}");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [vec!["bogus"], vec!["certify", "fish", "--n", "3"], vec!["enumerate", "--vertices", "x"], vec![]] {
        let (code, out, err) = lpaclass(&args, "");
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }
    let (code, out, _) = lpaclass(&["--help"], "");
    assert_eq!(code, 0);
    assert!(out.contains("find-path"));
}

#[test]
fn pretty_format_is_the_same_json() {
    let (_, compact, _) = lpaclass(&["classify", "--vertices", "2"], "");
    let (_, pretty, _) = lpaclass(&["--format", "pretty", "classify", "--vertices", "2"], "");
    assert!(pretty.lines().count() > 1);
    assert_eq!(json(&compact), json(&pretty));
}

#[test]
fn enumerate_three_vertices() {
    let (code, out, _) = lpaclass(&["enumerate", "--vertices", "3"], "");
    assert_eq!(code, 0);
    assert_eq!(json(&out).as_array().unwrap().len(), 34);
}

#[test]
fn dot_export() {
    let (_, s2, _) = lpaclass(&["builtin", "S2"], "");
    let (code, out, _) = lpaclass(&["analyze", "--dot", "-"], &s2);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph {"));
    assert_eq!(out.matches("->").count(), 3);
}
