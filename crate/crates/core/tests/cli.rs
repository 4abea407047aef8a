use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn cfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfree")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn table(values: Value) -> Value {
    json!({ "alphabet": ["a"], "max_len": 2, "values": values })
}

#[test]
fn transform_to_free_cumulants() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "phi.json", &table(json!({ "a": "1", "a.a": 2 })));
    let out = stdout_json(&cfree(&["transform", "--to", "free", "--input", &input]));
    assert_eq!(out["values"], json!({ "a": "1", "a.a": "1" }));
    let boolean = stdout_json(&cfree(&["transform", "--to", "boolean", "--input", &input]));
    assert_eq!(boolean["values"]["a.a"], "1");
}

#[test]
fn transform_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "phi.json", &table(json!({ "a": "1/2", "a.a": "-3/7" })));
    let kappa = dir.path().join("kappa.json");
    let out = cfree(&["transform", "--to", "monotone", "--input", &input, "--output", kappa.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let back = stdout_json(&cfree(&["transform", "--from", "monotone", "--input", kappa.to_str().unwrap()]));
    assert_eq!(back["values"], json!({ "a": "1/2", "a.a": "-3/7" }));
}

#[test]
fn cfree_transform_needs_a_pair() {
    let dir = tempfile::tempdir().unwrap();
    let lone = write(dir.path(), "phi.json", &table(json!({ "a": "1", "a.a": "2" })));
    let out = cfree(&["transform", "--to", "cfree", "--input", &lone]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let pair = json!({
        "phi": table(json!({ "a": "1", "a.a": "2" })),
        "psi": table(json!({ "a": "0", "a.a": "1" })),
    });
    let input = write(dir.path(), "pair.json", &pair);
    let r = stdout_json(&cfree(&["transform", "--to", "cfree", "--input", &input]));
    // R(aa) = φ(aa) − φ(a)²: the boolean value, since ψ does not enter at order 2.
    assert_eq!(r["values"], json!({ "a": "1", "a.a": "1" }));
}

#[test]
fn convolve_free_semicircles() {
    let dir = tempfile::tempdir().unwrap();
    let semi = json!({ "alphabet": ["s"], "max_len": 4, "values": { "s": 0, "s.s": 1, "s.s.s": 0, "s.s.s.s": 2 } });
    let path = write(dir.path(), "semi.json", &semi);
    let out = stdout_json(&cfree(&["convolve", "--kind", "free", "--input", &path, "--input2", &path]));
    assert_eq!(out["values"], json!({ "s": "0", "s.s": "2", "s.s.s": "0", "s.s.s.s": "8" }));
}

#[test]
fn convolve_rejects_mismatched_domains() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", &table(json!({ "a": 1, "a.a": 1 })));
    let b = write(dir.path(), "b.json", &json!({ "alphabet": ["a"], "max_len": 1, "values": { "a": 1 } }));
    let out = cfree(&["convolve", "--kind", "boolean", "--input", &a, "--input2", &b]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_noncrossing() {
    let out = cfree(&["enumerate", "--family", "nc", "--n", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 14);
    assert!(!text.contains("[[1,3],[2,4]]"));
    let summary = stdout_json(&cfree(&["enumerate", "--family", "boolean", "--n", "5", "--summary"]));
    assert_eq!(summary, json!({ "family": "boolean", "n": 5, "count": 16 }));
    let details = cfree(&["enumerate", "--family", "nc-irr", "--n", "3", "--details"]);
    let first: Value = serde_json::from_str(String::from_utf8_lossy(&details.stdout).lines().next().unwrap()).unwrap();
    assert!(first.get("tree_factorial").is_some() && first.get("kinds").is_some());
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--max-len", "3", "--seed", "5"];
    let (a, b) = (cfree(&args), cfree(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let only = cfree(&["verify", "--max-len", "3", "--seed", "5", "--only", "inverse,counit"]);
    let text = String::from_utf8(only.stdout).unwrap();
    assert_eq!(text, "PASS counit\nPASS inverse\n");
}

#[test]
fn verify_reports_corrupted_oracle() {
    let out = cfree(&["verify", "--max-len", "3", "--only", "oracle-free", "--corrupt-oracle"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("FAIL oracle-free word="), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cfree(&["transform", "--input", "/nonexistent"]).status.code(), Some(2));
    assert_eq!(cfree(&["verify", "--only", "no-such-identity"]).status.code(), Some(2));
    assert_eq!(cfree(&["bogus"]).status.code(), Some(2));
    let list = cfree(&["verify", "--list"]);
    assert!(String::from_utf8(list.stdout).unwrap().lines().any(|l| l == "sharp"));
}
