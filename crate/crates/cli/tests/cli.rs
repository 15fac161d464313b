use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn run(args: &[&str]) -> (i32, Value) {
    run_with(args, &[])
}

fn run_with(args: &[&str], env: &[(&str, &str)]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let out: Output = Command::new(env!("CARGO_BIN_EXE_strands-decat"))
        .args(args)
        .arg("--json")
        .arg(&json)
        .envs(env.iter().copied())
        .output()
        .unwrap();
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    (out.status.code().unwrap(), report)
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_d1() {
    let (code, r) = run(&["validate", path(&corpus("d1.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["details"]["pairs"], 1);
}

#[test]
fn validate_reports_circles() {
    let (code, r) = run(&["validate", path(&corpus("d5.json"))]);
    assert_eq!(code, 0);
    let kinds: Vec<&str> =
        r["details"]["components"].as_array().unwrap().iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["interval", "circle"]);
}

#[test]
fn malformed_json_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let (code, r) = run(&["validate", path(&bad)]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "error");
}

#[test]
fn invalid_matching_fails_with_violations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"components":[{"kind":"interval","points":[1,2,3]}],"matching":[[1,2]]}"#).unwrap();
    let (code, r) = run(&["validate", path(&bad)]);
    assert_eq!(code, 1);
    assert!(!r["details"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn algebra_d1() {
    let (code, r) = run(&["algebra", path(&corpus("d1.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["basis_sizes"], serde_json::json!({"0": 1, "1": 2}));
}

#[test]
fn algebra_beyond_top_weight_is_empty() {
    let (code, r) = run(&["algebra", path(&corpus("d1.json")), "--k", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["basis_sizes"]["5"], 0);
}

#[test]
fn algebra_d2() {
    let (code, _) = run(&["algebra", path(&corpus("d2.json")), "--winding-cap", "2"]);
    assert_eq!(code, 0);
}

#[test]
fn decat_d4() {
    let (code, r) = run(&["decat", path(&corpus("d4.json")), "--interval", "1"]);
    assert_eq!(code, 0);
    let m = &r["details"]["1"];
    assert_eq!(m["k0_e_matrix"], serde_json::json!(["01", "00"]));
    assert_eq!(m["phi_matrix"], m["k0_e_matrix"]);
}

#[test]
fn decat_d1_is_zero() {
    let (code, r) = run(&["decat", path(&corpus("d1.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["0"]["phi_matrix"], serde_json::json!(["00", "00"]));
}

#[test]
fn decat_rejects_a_circle() {
    let (code, r) = run(&["decat", path(&corpus("d5.json")), "--interval", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "error");
}

#[test]
fn glue_pants_and_two_disks() {
    let dir = tempfile::tempdir().unwrap();
    let disks = dir.path().join("disks.json");
    std::fs::write(
        &disks,
        r#"{"components":[{"genus":0,"boundary":[{"plus":1,"minus":1}]},{"genus":0,"boundary":[{"plus":1,"minus":1}]}]}"#,
    )
    .unwrap();
    let (code, r) = run(&[
        "glue",
        path(&corpus("pants.json")),
        path(&disks),
        "--pairs",
        "c0.b0.i0:c0.b0.i0,c0.b0.i1:c1.b0.i0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["module_dim"], 1);
}

#[test]
fn glue_without_pairs_multiplies_dimensions() {
    let (code, r) = run(&["glue", path(&corpus("pants.json")), path(&corpus("annulus.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["module_dim"], 16);
}

#[test]
fn glue_self() {
    let (code, r) = run(&["glue", path(&corpus("annulus.json")), "--self", "--pairs", "c0.b0.i0:c0.b1.i0"]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["constructive"]["case"], "different_circles_only");
    assert_eq!(r["details"]["constructive"]["invertible"], true);
}

#[test]
fn glue_bad_label() {
    let (code, _) = run(&["glue", path(&corpus("pants.json")), "--self", "--pairs", "c0.b0.i0:c0.b0.i7"]);
    assert_eq!(code, 2);
}

#[test]
fn suite_passes_and_is_deterministic() {
    let (code, a) = run(&["suite"]);
    assert_eq!(code, 0);
    assert_eq!(a["details"]["criteria"].as_array().unwrap().len(), 10);
    let (_, b) = run_with(&["suite"], &[("STRANDS_DECAT_THREADS", "1")]);
    assert_eq!(a.to_string(), b.to_string());
}

#[test]
fn injected_fault_fails_with_counterexamples() {
    let (code, r) = run(&["suite", "--inject-fault", "phi"]);
    assert_eq!(code, 1);
    let main = &r["details"]["criteria"][3];
    assert_eq!(main["passed"], false);
    assert!(!main["counterexamples"].as_array().unwrap().is_empty());
}
