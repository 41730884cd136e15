use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn kwitness_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kwitness"));
    cmd.args(args).env_remove("KWITNESS_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn kwitness(args: &[&str]) -> Run {
    kwitness_env(args, &[])
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn module(nu: Value) -> Value {
    let rank = nu.as_array().unwrap().len();
    json!({
        "format": 1,
        "ring": {"kind": "integers"},
        "dimension": 0,
        "ranks": [{"position": [], "rank": rank}],
        "differentials": [],
        "nil": [{"position": [], "matrix": nu}]
    })
}

/// 0 → ℤ → ℤ² → ℤ → 0 with both differentials equal and ν a shift in the middle.
fn diagonal_121() -> Value {
    let d = json!([
        {"position": [1], "matrix": [[0, 1]]},
        {"position": [2], "matrix": [[1], [0]]}
    ]);
    json!({
        "format": 1,
        "ring": {"kind": "integers"},
        "dimension": 1,
        "ranks": [
            {"position": [0], "rank": 1},
            {"position": [1], "rank": 2},
            {"position": [2], "rank": 1}
        ],
        "differentials": [{"d": d, "dTilde": d}],
        "nil": [{"position": [1], "matrix": [[0, 1], [0, 0]]}]
    })
}

fn certificate_for(dir: &TempDir, instance: &Value) -> (PathBuf, Value) {
    let input = write(dir, "input.json", instance);
    let out = dir.path().join("cert.json");
    let r = kwitness(&["reduce", s(&input), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let cert: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    (out, cert)
}

#[test]
fn validate_accepts_a_nilpotent_module() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "n0.json", &module(json!([[0, 1], [0, 0]])));
    let r = kwitness(&["validate", s(&p)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("nilpotency index 2"), "{}", r.stdout);
}

#[test]
fn validate_names_the_failed_condition() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "id.json", &module(json!([[1, 0], [0, 1]])));
    let r = kwitness(&["validate", s(&p)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("nilpotency"), "{}", r.stdout);
}

#[test]
fn unreadable_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("truncated.json");
    fs::write(&p, &serde_json::to_string(&diagonal_121()).unwrap()[..50]).unwrap();
    let r = kwitness(&["validate", s(&p)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 1 column"), "{}", r.stderr);
    assert_eq!(kwitness(&["validate", s(&dir.path().join("missing.json"))]).code, 2);
    let bad_shape = json!({
        "format": 1, "ring": {"kind": "integers"}, "dimension": 0,
        "ranks": [{"position": [], "rank": 2}], "nil": [{"position": [], "matrix": [[0, 1]]}]
    });
    let r = kwitness(&["validate", s(&write(&dir, "shape.json", &bad_shape))]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("nil[0].matrix"), "{}", r.stderr);
}

#[test]
fn reduce_then_verify_accepts() {
    let dir = TempDir::new().unwrap();
    let (cert_path, cert) = certificate_for(&dir, &module(json!([[0, 1, 2], [0, 0, 3], [0, 0, 0]])));
    let kinds: Vec<&str> = cert["steps"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds.first(), Some(&"shortExact"));
    let r = kwitness(&["verify", s(&cert_path)]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.starts_with("accept"), "{}", r.stdout);
}

#[test]
fn reduce_writes_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "n0.json", &module(json!([[0, 1], [0, 0]])));
    let r = kwitness(&["reduce", s(&p), "--strategy", "min-index"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let cert: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(cert["format"], 1);
}

#[test]
fn zero_endomorphism_gets_a_trivial_certificate() {
    let dir = TempDir::new().unwrap();
    let (cert_path, cert) = certificate_for(&dir, &module(json!([[0, 0], [0, 0]])));
    let steps = cert["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0]["kind"], "isomorphism");
    assert_eq!(steps[0]["maps"][0]["matrix"], json!([["1", "0"], ["0", "1"]]));
    assert_eq!(kwitness(&["verify", s(&cert_path)]).code, 0);
}

#[test]
fn reduction_failure_is_reported_with_its_line() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "diag.json", &diagonal_121());
    let report = dir.path().join("report.json");
    let r = kwitness(&["reduce", s(&input), "--report", s(&report)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("not exact at degree 0"), "{}", r.stderr);
    let text = fs::read_to_string(&report).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["annotation"]["kind"], "splitFailure");
    assert_eq!(v["annotation"]["depth"], 0);
    assert!(v["annotation"]["failures"][0].as_str().unwrap().contains("direction 0"));
    // The report is itself a valid instance.
    assert_eq!(kwitness(&["validate", s(&report)]).code, 0);
}

#[test]
fn verify_rejects_a_tampered_map() {
    let dir = TempDir::new().unwrap();
    let (_, mut cert) = certificate_for(&dir, &module(json!([[0, 1], [0, 0]])));
    let entry = &mut cert["steps"][0]["inclusions"][0]["matrix"][0][0];
    let old: i64 = entry.as_str().unwrap().parse().unwrap();
    *entry = json!((old + 1).to_string());
    let p = write(&dir, "tampered.json", &cert);
    let r = kwitness(&["verify", s(&p)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("step 0"), "{}", r.stdout);
}

#[test]
fn verify_rejects_a_claim_without_steps() {
    let dir = TempDir::new().unwrap();
    let (_, mut cert) = certificate_for(&dir, &module(json!([[0, 1], [0, 0]])));
    cert["steps"] = json!([]);
    let p = write(&dir, "empty.json", &cert);
    let r = kwitness(&["verify", s(&p)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("claim"), "{}", r.stdout);
    fs::write(&p, "{\"format\": 1}").unwrap();
    assert_eq!(kwitness(&["verify", s(&p)]).code, 2);
}

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let r = kwitness(&["gen", "--seed", "7", "--dim", "1", "--count", "5", "--out", s(out)]);
        assert_eq!(r.code, 0, "{}", r.stderr);
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for name in &names {
        let (pa, pb) = (a.join(name), b.join(name));
        assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap(), "{name:?}");
        let r = kwitness(&["validate", s(&pa)]);
        assert_eq!(r.code, 0, "{name:?}: {}", r.stdout);
    }
    let first = kwitness(&["gen", "--seed", "7", "--dim", "1", "--count", "1", "--out", s(&dir.path().join("c"))]);
    assert_eq!(first.code, 0);
    assert_eq!(fs::read(a.join("instance-000.json")).unwrap(), fs::read(dir.path().join("c/instance-000.json")).unwrap());
}

#[test]
fn gen_over_a_localized_ring() {
    let dir = TempDir::new().unwrap();
    let r = kwitness(&["gen", "--seed", "2", "--dim", "2", "--prime", "3", "--out", s(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let p = dir.path().join("instance-000.json");
    let v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["ring"], json!({"kind": "localized", "prime": 3}));
    assert_eq!(kwitness(&["validate", s(&p)]).code, 0);
}

#[test]
fn gen_rejects_bad_arguments() {
    let dir = TempDir::new().unwrap();
    let out = s(dir.path());
    assert_eq!(kwitness(&["gen", "--seed", "1", "--dim", "3", "--out", out]).code, 2);
    assert_eq!(kwitness(&["gen", "--seed", "1", "--dim", "1", "--count", "0", "--out", out]).code, 2);
    assert_eq!(kwitness(&["gen", "--seed", "1", "--dim", "1", "--prime", "4", "--out", out]).code, 2);
}

#[test]
fn selftest_suites_pass() {
    for suite in ["linalg", "oracle", "tamper"] {
        let r = kwitness(&["selftest", "--suite", suite, "--seed", "3"]);
        assert_eq!(r.code, 0, "{suite}: {}", r.stdout);
        assert!(r.stdout.starts_with("[PASS]"), "{}", r.stdout);
    }
}

#[test]
fn thread_setting_is_checked() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "n0.json", &module(json!([[0, 1], [0, 0]])));
    for bad in ["0", "many", ""] {
        let r = kwitness_env(&["validate", s(&p)], &[("KWITNESS_THREADS", bad)]);
        assert_eq!(r.code, 2, "{bad:?}");
        assert!(r.stderr.contains("KWITNESS_THREADS"), "{}", r.stderr);
    }
    assert_eq!(kwitness_env(&["validate", s(&p)], &[("KWITNESS_THREADS", "2")]).code, 0);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(kwitness(&[]).code, 2);
    assert_eq!(kwitness(&["frobnicate"]).code, 2);
    let r = kwitness(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("reduce"), "{}", r.stdout);
}
