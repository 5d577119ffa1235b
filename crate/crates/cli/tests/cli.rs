use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_e7sp6")).args(args).output().expect("spawn")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("e7sp6-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn restrict_d2_both_routes() {
    let v = json(&["restrict", "--form", "ikeda", "--weight", "20", "--index", "D:2", "--route", "both"]);
    assert_eq!(v["value"], "228");
    assert_eq!(v["routes_agree"], true);
    assert_eq!(v["index"], "D:2");
}

#[test]
fn restrict_eisenstein_rational() {
    let v = json(&["restrict", "--form", "eisenstein", "--weight", "16", "--index", "u2"]);
    assert_eq!(v["value"], "16320/3617");
    assert_eq!(v["routes_agree"], Value::Null);
}

#[test]
fn table1_columns() {
    let v = json(&["table1"]);
    let counts: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["count"].as_str().unwrap()).collect();
    assert_eq!(counts, ["18192384", "3752952", "459648", "55188", "378", "2268", "1"]);
    assert_eq!(v[6]["case"], serde_json::json!([2, 4, 8]));
}

#[test]
fn triples_and_shells() {
    let v = json(&["triples", "--norms", "1,1,1", "--t", "0"]);
    assert_eq!(v[0]["count"], "1065960");
    let v = json(&["shells", "--max", "2"]);
    assert_eq!(v[1]["count"], "2160");
    let v = json(&["shells", "--max", "1", "--kind", "half"]);
    assert_eq!(v[0]["count"], "56");
}

#[test]
fn qseries_prec_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_e7sp6"))
        .args(["qseries", "--series", "thetaE7"])
        .env("E7SP6_PREC", "3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["1", "126", "756"]));
}

#[test]
fn coeff_values() {
    let v = json(&["coeff", "--form", "ikeda", "--weight", "20", "--element", r#"{"diag":[1,1,6]}"#]);
    assert_eq!(v["value"], "-6048");
    let v = json(&["coeff", "--form", "eisenstein", "--weight", "12", "--element", r#"{"diag":[1,0,0]}"#]);
    assert_eq!(v["rank"], 1);
}

#[test]
fn exit_codes() {
    let out = run(&["solve"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("label,<index>"));
    assert_eq!(run(&["restrict", "--form", "eisenstein", "--weight", "12", "--index", "H"]).status.code(), Some(3));
    assert_eq!(run(&["restrict", "--form", "ikeda", "--weight", "20", "--index", "Q"]).status.code(), Some(2));
    assert_eq!(run(&["triples", "--norms", "4,1,1"]).status.code(), Some(3));
    assert_eq!(run(&["coeff", "--form", "ikeda", "--weight", "20", "--element", "{"]).status.code(), Some(2));
}

#[test]
fn solve_from_files() {
    let basis = scratch("basis.csv", "label,O,u2,D:1\nf1,1,0,2\nf2,0,1,3\n");
    let rhs = scratch("rhs.csv", "label,O,u2,D:1\nF,1/2,-1,-2\n");
    let v = json(&["solve", "--basis", basis.to_str().unwrap(), "--rhs-from", "file", "--rhs", rhs.to_str().unwrap()]);
    assert_eq!(v["coefficients"][0]["value"], "1/2");
    assert_eq!(v["coefficients"][1]["value"], "-1");
    assert_eq!(v["check_columns"], serde_json::json!(["D:1"]));
    let bad = scratch("bad.csv", "label,O,u2,D:1\nF,1,1,1\n");
    assert_eq!(
        run(&["solve", "--basis", basis.to_str().unwrap(), "--rhs-from", "file", "--rhs", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn solve_computed_rhs() {
    // Identity basis on O and u2: coefficients equal the restriction values.
    let basis = scratch("id.csv", "label,O,u2\ng1,1,0\ng2,0,1\n");
    let v = json(&["solve", "--basis", basis.to_str().unwrap(), "--weight", "16"]);
    assert_eq!(v["coefficients"][0]["value"], "1");
    assert_eq!(v["coefficients"][1]["value"], "16320/3617");
}

#[test]
fn output_independent_of_jobs() {
    let cases: [&[&str]; 3] = [
        &["triples", "--norms", "2,2,1"],
        &["restrict", "--form", "eisenstein", "--weight", "12", "--index", "D:2", "--route", "enum"],
        &["restrict", "--form", "ikeda", "--weight", "20", "--index", "G", "--route", "enum"],
    ];
    for args in cases {
        let base = run(&[&["--jobs", "1"], args].concat()).stdout;
        for j in ["2", "3"] {
            assert_eq!(run(&[&["--jobs", j], args].concat()).stdout, base, "{args:?} with --jobs {j}");
        }
    }
}
