//! End-to-end checks of the command line interface.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oddkh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn trefoil_homology() {
    let v = json(&["--knot", "3_1", "--op", "homology", "--json"]);
    assert_eq!(v["schema"], 1);
    let odd = v["odd"].as_array().unwrap();
    assert!(odd
        .iter()
        .any(|g| g["i"] == 3 && g["j"] == 9 && g["group"] == "Z"));
    let m = json(&["--knot", "3_1", "--mirror", "--op", "homology", "--json"]);
    assert!(m["odd"]
        .as_array()
        .unwrap()
        .iter()
        .any(|g| g["i"] == -3 && g["j"] == -9 && g["group"] == "Z"));
}

#[test]
fn chang_words_of_t34() {
    let v = json(&["--knot", "8_19", "--op", "chang", "--json"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["j"], 11);
    assert_eq!(rows[0]["sq2even"], "_2η");
    assert_eq!(rows[0]["sq2e0"], "η2");
    assert_eq!(rows[0]["sq2e1"], "");
}

#[test]
fn refined_s_invariant() {
    let v = json(&["--knot", "m9_42", "--op", "sinv", "--json"]);
    assert_eq!(v["s_f2"], 0);
    assert_eq!(v["refinements"]["sq2e0"], serde_json::json!([0, 2, 0, 0]));
}

#[test]
fn validate_reports_no_violations() {
    let v = json(&["--knot", "4_1", "--op", "validate", "--seed", "7", "--json"]);
    assert!(v["checks"].as_u64().unwrap() > 0);
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(
        run(&["--pd", "X[1,2", "--op", "homology"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["--knot", "no_such_knot", "--op", "homology"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn links_are_rejected_by_sinv() {
    let out = run(&["--pd", "U U", "--op", "sinv"]);
    assert_ne!(out.status.code(), Some(0));
}
