use std::process::Command;

use serde_json::Value;

fn spinsurf(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spinsurf")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("stdout is JSON")
}

#[test]
fn audit_names_frozen_convention() {
    let (code, out) = spinsurf(&["audit", "--samples", "16"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema"], "spinsurf.report/1");
    assert_eq!(v["frozen"]["sigma"], -1);
    assert_eq!(v["frozen"]["tau"], -1);
}

#[test]
fn forced_wrong_convention_exits_one() {
    let (code, _) = spinsurf(&["audit", "--samples", "16", "--force-convention", "1,-1"]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["audit", "--grid", "4x4"],
        vec!["audit", "--grid", "banana"],
        vec!["roundtrip"],
        vec!["roundtrip", "--preset", "no-such-surface"],
        vec!["roundtrip", "--preset", "round-sphere-R3", "--tol", "dirac=-1"],
        vec!["frobnicate"],
        vec!["audit", "--format", "xml"],
    ] {
        let (code, _) = spinsurf(&args);
        assert_eq!(code, 2, "{args:?}");
    }
}

#[test]
fn roundtrip_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rt.json");
    let obj = dir.path().join("rt.obj");
    let (code, _) = spinsurf(&[
        "roundtrip",
        "--preset",
        "round-sphere-R3",
        "--grid",
        "24x20",
        "--out",
        out.to_str().unwrap(),
        "--export-obj",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v = json(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(v["config"]["grid"], serde_json::json!([24, 20]));
    assert_eq!(v["passed"], true);
    let obj = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 24 * 20);
}

#[test]
fn perturbed_roundtrip_exits_one() {
    let (code, out) = spinsurf(&["roundtrip", "--preset", "round-sphere-R3", "--grid", "16x16", "--perturb", "0.01"]);
    assert_eq!(code, 1);
    let v = json(&out);
    let failures = v["results"][0]["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f == "input.gauss"));
}

#[test]
fn csv_format() {
    let (code, out) = spinsurf(&["adjudicate", "--preset", "round-sphere-R3", "--grid", "12x12", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("preset,signature,epsilon"));
    assert!(lines.next().unwrap().starts_with("round-sphere-R3,(2,0),1"));
}

#[test]
fn empty_preset_list() {
    let (code, out) = spinsurf(&["adjudicate", "--preset", "none"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["rows"], serde_json::json!([]));
}

#[test]
fn output_is_byte_stable() {
    let args = ["adjudicate", "--preset", "de-sitter-R21", "--grid", "12x12", "--seed", "7"];
    assert_eq!(spinsurf(&args), spinsurf(&args));
}

#[test]
fn lists_presets_without_a_command() {
    let (code, out) = spinsurf(&["--list-presets"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 10);
    assert!(out.lines().any(|l| l.starts_with("de-sitter-R21")));
}

#[test]
fn missing_command_exits_two() {
    assert_eq!(spinsurf(&[]).0, 2);
}
