use std::process::Command;

use serde_json::Value;

fn frameadm(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_frameadm")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap() + &String::from_utf8(out.stderr).unwrap();
    (out.status.code().expect("exit code"), text)
}

fn roundtrip(operator: &str, sequence: &str, extra: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frame.json");
    let path = path.to_str().unwrap();
    let mut args = vec!["synthesize", "--operator", operator, "--sequence", sequence, "--out", path];
    args.extend_from_slice(extra);
    let (code, text) = frameadm(&args);
    assert_eq!(code, 0, "{text}");
    let (code, text) = frameadm(&["verify", "--frame", path]);
    assert_eq!(code, 0, "{text}");
    let (code, text) = frameadm(&["excess", "--frame", path, "--format", "text"]);
    assert_eq!(code, 0);
    assert!(text.contains("excess:"), "{text}");
}

#[test]
fn finite_roundtrip() {
    roundtrip(r#"{"kind":"matrix","data":[[2,0],[0,2]]}"#, "[1,1,1,1]", &[]);
    roundtrip(r#"{"kind":"matrix","data":[[2,1,0],[1,2,0],[0,0,1]]}"#, "[1.5,1,1,0.75,0.75]", &[]);
}

#[test]
fn truncated_roundtrip() {
    roundtrip(
        r#"{"kind":"matrix","data":[[1]]}"#,
        r#"{"tail":{"kind":"generator","name":"geometric","params":{"g":0.5,"rho":0.5}}}"#,
        &["--mode", "truncated", "--n", "5"],
    );
}

#[test]
fn head_and_greedy_roundtrip() {
    let op = r#"{"kind":"diagonal","sequence":{"tail":{"kind":"generator","name":"alternating","params":{"v1":1,"v2":2}}}}"#;
    let seq = r#"{"tail":{"kind":"constant","value":1.5}}"#;
    roundtrip(op, seq, &["--mode", "head"]);
    roundtrip(op, seq, &["--mode", "greedy", "--steps", "5"]);
}

#[test]
fn verify_rejects_wrong_target() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frame.json");
    std::fs::write(&path, r#"{"dim":2,"vectors":[[1,0],[0,1]]}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(frameadm(&["verify", "--frame", p, "--operator", r#"{"kind":"matrix","data":[[1,0],[0,1]]}"#, "--sequence", "[1,1]"]).0, 0);
    assert_eq!(frameadm(&["verify", "--frame", p, "--operator", r#"{"kind":"matrix","data":[[2,0],[0,1]]}"#, "--sequence", "[1,1]"]).0, 1);
    assert_eq!(frameadm(&["verify", "--frame", p]).0, 2);
}

#[test]
fn exit_codes_follow_the_trichotomy() {
    let harmonic = r#"{"kind":"diagonal","sequence":{"tail":{"kind":"generator","name":"harmonic_gap"}}}"#;
    let (code, text) = frameadm(&["check", "--operator", harmonic, "--sequence", r#"{"head":[1],"tail":{"kind":"constant","value":0.5}}"#]);
    assert_eq!(code, 3, "{text}");
    let identity = r#"{"kind":"matrix","data":[[1,0],[0,1]]}"#;
    assert_eq!(frameadm(&["check", "--operator", identity, "--sequence", "[1,1]"]).0, 0);
    assert_eq!(frameadm(&["check", "--operator", identity, "--sequence", "[1.5,0.5]"]).0, 1);
    assert_eq!(frameadm(&["check", "--operator", identity]).0, 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["check", "--operator", r#"{"kind":"diagonal","sequence":{"tail":{"kind":"generator","name":"alternating","params":{"v1":0.5,"v2":1}}}}"#, "--sequence", r#"{"tail":{"kind":"generator","name":"alternating","params":{"v1":0.5,"v2":1}}}"#];
    assert_eq!(frameadm(&args), frameadm(&args));
}

#[test]
fn examples_command() {
    let (code, text) = frameadm(&["examples"]);
    assert_eq!(code, 0, "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["examples"].as_array().unwrap().len(), 6);
    let (code, text) = frameadm(&["examples", "6.1", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(text.contains("expected_status: undetermined"), "{text}");
}
