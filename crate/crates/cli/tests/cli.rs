use std::path::PathBuf;
use std::process::Command;

use nielsen_cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("nielsen").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check_golden(name: &str, args: &[&str], expected_code: i32) {
    let (code, out, err) = invoke(args);
    assert_eq!(code, expected_code, "{args:?}: {err}");
    let actual: Value = serde_json::from_str(&out).unwrap();
    let path = golden(name);
    if std::env::var_os("NIELSEN_BLESS").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn assert_report_schema(v: &Value) {
    let obj = v.as_object().expect("report is an object");
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["checks", "command", "data", "pass"]);
    let checks = obj["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        let mut ck: Vec<&str> = c.as_object().unwrap().keys().map(String::as_str).collect();
        ck.sort();
        assert_eq!(ck, ["anchor", "name", "verdict", "witness"]);
        assert!(c["verdict"].is_boolean());
        assert!(!c["anchor"].as_str().unwrap().is_empty());
    }
    let all = checks.iter().all(|c| c["verdict"] == Value::Bool(true));
    assert_eq!(obj["pass"], Value::Bool(all));
}

#[test]
fn golden_reports() {
    check_golden("gpq_4_1_2_a1.json", &["gpq", "--n", "4", "--p", "1", "--q", "2", "--w", "a1"], EXIT_PASS);
    check_golden("inner_gpq_1_2.json", &["inner-gpq", "--p", "1", "--q", "2"], EXIT_PASS);
    check_golden("gl_rep_l12.json", &["gl-rep", "--expr", "L12"], EXIT_PASS);
    check_golden("lk_basis_3.json", &["lk-basis", "--k", "3"], EXIT_PASS);
    check_golden("lemma_pq_1_2.json", &["lemma-pq", "--tau", "1,0", "--p", "1", "--q", "2"], EXIT_PASS);
    check_golden("induce_3_2.json", &["induce", "--d", "3", "--ell", "2"], EXIT_PASS);
    check_golden(
        "check_octo_degenerate.json",
        &["check-octo", "--u1", "1,0,0", "--u2", "0,1,0", "--v1", "1,0,0", "--v2", "0,1,0"],
        EXIT_FAIL,
    );
}

#[test]
fn every_command_shares_the_report_schema() {
    let commands: &[&[&str]] = &[
        &["verify-relations"],
        &["verify-relations", "--mode", "out"],
        &["gpq", "--n", "5", "--p", "2", "--q", "3", "--w", "a1 a2^-1"],
        &["inner-gpq", "--p", "3", "--q", "3"],
        &["gl-rep", "--expr", "L21", "--p", "3"],
        &["lk-basis", "--k", "5"],
        &["sanov"],
        &["voronoi", "--gens", "1,0,0;0,1,0;0,0,1"],
        &["check-octo", "--u1", "2,2,0", "--u2", "2,-2,0", "--v1", "2,0,2", "--v2", "2,0,-2"],
        &["nielsen-flat", "--scale", "1"],
        &["lemma-pq", "--tau", "0,0,0", "--p", "1", "--q", "3"],
        &["induce", "--d", "2", "--ell", "-7/3"],
    ];
    for args in commands {
        let (code, out, err) = invoke(args);
        assert_eq!(code, EXIT_PASS, "{args:?}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_report_schema(&v);
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(invoke(&["verify-relations", "--inject-fault"]).0, EXIT_FAIL);
    assert_eq!(invoke(&["sanov", "--p", "1", "--max-len", "12"]).0, EXIT_FAIL);
    // usage and parse errors
    assert_eq!(invoke(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["gpq", "--n", "4"]).0, EXIT_USAGE);
    let (code, _, err) = invoke(&["gpq", "--n", "4", "--p", "1", "--q", "2", "--w", "a1 a7"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("byte 3") && err.contains("not in rank 4"), "{err}");
    let (code, _, err) = invoke(&["voronoi", "--gens", "1,0,0;0,x,0"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("byte 8"), "{err}");
    // preconditions
    assert_eq!(invoke(&["gpq", "--n", "4", "--p", "1", "--q", "2", "--w", "a3"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["gpq", "--n", "4", "--p", "0", "--q", "2", "--w", "a1"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["gl-rep", "--expr", "L13"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["voronoi", "--gens", "1,0,0;2,0,0"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["nielsen-flat", "--scale", "0"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["lk-basis", "--k", "1"]).0, EXIT_USAGE);
    let (code, _, err) = invoke(&["lemma-pq", "--tau", "1,0", "--p", "3", "--q", "3"]);
    assert_eq!(code, EXIT_USAGE);
    let e: Value = serde_json::from_str(&err).unwrap();
    assert!(e["error"].as_str().unwrap().starts_with("refused"));
}

#[test]
fn pretty_table() {
    let (code, out, _) = invoke(&["--pretty", "inner-gpq", "--p", "1", "--q", "2"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.lines().next().unwrap() == "inner-gpq");
    assert!(out.contains("PASS  t_beta"));
    assert!(out.trim_end().ends_with("overall: PASS"));
}

#[test]
fn off_and_sidecar_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let off = dir.path().join("cell.off");
    let (code, out, err) = invoke(&["nielsen-flat", "--scale", "1", "--out", off.to_str().unwrap(), "--precision", "2"]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let text = std::fs::read_to_string(&off).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    assert_eq!(lines.next(), Some("14 12 24"));
    assert_eq!(text.lines().count(), 2 + 14 + 12);
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cell.json")).unwrap()).unwrap();
    assert_eq!(sidecar["format"], "exact-rational-polytope");
    assert_eq!(sidecar["vertices"].as_array().unwrap().len(), 14);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert!(report["data"]["files"]["exact"].as_str().unwrap().ends_with("cell.json"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nielsen");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["inner-gpq", "--p", "-1", "--q", "3"]), EXIT_PASS);
    assert_eq!(status(&["verify-relations", "--inject-fault"]), EXIT_FAIL);
    assert_eq!(status(&["lemma-pq", "--tau", "1,0", "--p", "2", "--q", "2"]), EXIT_USAGE);
    assert_eq!(status(&["--help"]), EXIT_PASS);
}
