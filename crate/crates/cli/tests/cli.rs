use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qseries"))
        .args(args)
        .env_remove("QSERIES_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn expand_prints_series() {
    let o = run(&["expand", "chi(q^5)", "-N", "21"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1 + q^5 + q^15 + q^20 + O(q^21)");
}

#[test]
fn expand_json_follows_series_schema() {
    let o = run(&["expand", "phi(q)", "-N", "5", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["expDen"], 1);
    assert_eq!(v["order"], "5/1");
    let exps: Vec<_> = v["coeffs"].as_array().unwrap().iter().map(|c| c["exp"].as_str().unwrap()).collect();
    assert_eq!(exps, ["0/1", "1/1", "4/1"]);
    assert_eq!(v["coeffs"][1]["a"], "2/1");
}

#[test]
fn expand_reports_errors_with_exit_two() {
    let o = run(&["expand", "theta2(1; q)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not representable"));
    let o = run(&["expand", "phi("]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn order_comes_from_the_environment_unless_given() {
    let o = Command::new(env!("CARGO_BIN_EXE_qseries"))
        .args(["expand", "phi(q)"])
        .env("QSERIES_ORDER", "2")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "1 + 2*q + O(q^2)");
    let o = Command::new(env!("CARGO_BIN_EXE_qseries"))
        .args(["expand", "phi(q)", "-N", "1"])
        .env("QSERIES_ORDER", "2")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "1 + O(q)");
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "I12", "-N", "300"]).status.code(), Some(0));
    let o = run(&["verify", "I13a", "-N", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("first mismatch at q^1"));
    assert_eq!(run(&["verify", "BOGUS"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "I9", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "I1", "-N", "0"]).status.code(), Some(2));
}

#[test]
fn verify_all_summary() {
    let o = run(&["verify-all", "-N", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 18);
    assert!(text.trim_end().ends_with("16 pass, 1 expected-fail"));
    let o = run(&["verify-all", "-N", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("17 pass, 0 expected-fail"));
}

#[test]
fn empty_grid_is_not_an_expected_verdict() {
    let o = run(&["verify-all", "-N", "5", "--samples", "none"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("I9    numeric SKIP"));
}

#[test]
fn bench_rows_and_usage() {
    let o = run(&["bench", "--orders", "8,40", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
    assert_eq!(run(&["bench", "--orders"]).status.code(), Some(2));
    assert_eq!(run(&["bench"]).status.code(), Some(2));
}

#[test]
fn list_shows_the_registry() {
    let o = run(&["list"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 17);
    assert!(text.lines().any(|l| l.starts_with("I4") && l.contains("lost notebook")));
    let o = run(&["list", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[13]["id"], "I13a");
    assert_eq!(v[13]["expected"], "fail at q^1");
}
