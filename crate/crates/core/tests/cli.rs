//! End-to-end runs of the `harmonia` binary.

use std::path::Path;
use std::process::{Command, Output};

fn harmonia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmonia")).args(args).output().expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().expect("utf-8 path").to_string()
}

#[test]
fn phi_emits_profile_csv() {
    let out = harmonia(&["phi", "--space", "h3", "--lambda", "1", "--rmax", "4", "--nodes", "17"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,value_re,value_im"));
    assert_eq!(lines.next(), Some("0,1,0"));
    assert_eq!(text.lines().count(), 18);
}

#[test]
fn fundsol_solve_and_heat_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let fsol = path(dir.path(), "fsol.csv");
    assert!(harmonia(&["fundsol", "--space", "h3", "--poly", "-1,1", "--out", &fsol]).status.success());
    let text = std::fs::read_to_string(&fsol).unwrap();
    let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((first[1] + 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);

    let ht = path(dir.path(), "ht.csv");
    assert!(harmonia(&["heat", "--space", "h3", "--t", "0.5", "--out", &ht]).status.success());
    let u = path(dir.path(), "u.csv");
    let out = harmonia(&["solve", "--space", "h3", "--poly", "-1,1", "--rhs", &ht, "--out", &u]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("relative residual"));

    let report = path(dir.path(), "span.json");
    let out = harmonia(&["heat-span", "--space", "h3", "--target", &ht, "--times", "0.25,0.5,1", "--out", &report]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(json["relative_l1_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn identify_reports_the_polynomial() {
    let out = harmonia(&["identify", "--space", "h3", "--op", "builtin:laplacian2", "--mbound", "4"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let coeffs = json["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 3);
    assert!((coeffs[2][0].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let out = harmonia(&["identify", "--space", "h3", "--op", "builtin:r2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_follow_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, r#"{"space": "h3", "colour": 1}"#).unwrap();
    let report = path(dir.path(), "report.json");
    let out = harmonia(&["verify", "algebra", "--config", &bad, "--out", &report]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!Path::new(&report).exists());

    let out = harmonia(&["fundsol", "--space", "e3", "--poly", "0,1"]);
    assert_eq!(out.status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_harmonia"))
        .args(["phi", "--lambda", "1"])
        .env("HARMONIA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_writes_a_deterministic_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = path(dir.path(), "config.json");
    std::fs::write(&config, r#"{"name": "cli", "space": "h2", "seed": 3}"#).unwrap();
    let (a, b) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    for out in [&a, &b] {
        let status = Command::new(env!("CARGO_BIN_EXE_harmonia"))
            .args(["verify", "algebra", "--config", &config, "--out", out])
            .env("HARMONIA_THREADS", "1")
            .status()
            .unwrap();
        assert!(status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let json: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(json["experiment"], "cli");
    assert_eq!(json["seed"], 3);
    assert!(json["entries"].as_array().unwrap().iter().all(|e| e["anchor"].is_string()));
}
