use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpmackey")).args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("JSON output")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cpmackey-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn validate_burnside_passes() {
    let out = run(&["validate", "--input", problem("mackey.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert_eq!(v["command"], "validate");
    assert_eq!(v["success"], true);
}

#[test]
fn constant_f2_is_not_a_field() {
    let out = run(&["field-check", problem("constant-f2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("NotField"), "{text}");
    assert!(text.contains("Z/2"), "{text}");
}

#[test]
fn malformed_matrix_is_a_schema_error() {
    let out = run(&["validate", "--input", problem("malformed.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let v = json(&out.stderr);
    assert_eq!(v["pointer"], "/payload/functors/0/tr/0");
}

#[test]
fn size_limit_is_a_computation_error() {
    let out = run(&["hh", "--input", problem("hh-untwisted.json").to_str().unwrap(), "--limit-generators", "8"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stderr).unwrap();
    assert!(text.to_lowercase().contains("limit"), "{text}");
}

#[test]
fn command_must_match_the_file() {
    let out = run(&["hh", "--input", problem("mackey.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out.stderr)["pointer"], "/command");
}

#[test]
fn unknown_fields_are_rejected() {
    let p = scratch(
        "extra.json",
        r#"{"version": 1, "command": "validate", "payload": {"functors": [{"preset": "burnside", "prime": 2, "colour": 1}]}}"#,
    );
    let out = run(&["validate", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stderr).unwrap();
    assert!(text.contains("colour"), "{text}");
    let q = scratch("top.json", r#"{"version": 1, "command": "validate", "payload": {}, "extra": true}"#);
    assert_eq!(run(&["validate", q.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn unsupported_version_is_rejected() {
    let p = scratch("v2.json", r#"{"version": 2, "command": "validate", "payload": {}}"#);
    let out = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out.stderr)["pointer"], "/version");
}

#[test]
fn table_format_is_plain_text() {
    let out = run(&["e2", "--format", "table", problem("e2-one.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(serde_json::from_str::<Value>(&text).is_err());
    assert!(!text.trim().is_empty());
}

#[test]
fn output_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("cpmackey-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("report.json");
    let out = run(&["circle", problem("circle.json").to_str().unwrap(), "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["success"], true);
}

#[test]
fn window_flag_overrides_the_file() {
    let out = run(&["em-homotopy", problem("em-homotopy.json").to_str().unwrap(), "--window", "a=-1..1,m=0..0"]);
    assert_eq!(out.status.code(), Some(0));
    let small = out.stdout.len();
    let out = run(&["em-homotopy", problem("em-homotopy.json").to_str().unwrap()]);
    assert!(out.stdout.len() > small);
    let bad = run(&["em-homotopy", problem("em-homotopy.json").to_str().unwrap(), "--window", "nonsense"]);
    assert_ne!(bad.status.code(), Some(0));
}

#[test]
fn fabricated_differential_fails_leibniz() {
    let out = run(&["leibniz", problem("leibniz-fabricated.json").to_str().unwrap()]);
    let v = json(&out.stdout);
    assert_eq!(v["report"]["consistent"], false, "{v}");
    let ok = json(&run(&["leibniz", problem("leibniz-zero.json").to_str().unwrap()]).stdout);
    assert_eq!(ok["report"]["collapse_certified"], true, "{ok}");
}
