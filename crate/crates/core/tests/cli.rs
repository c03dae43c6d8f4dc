//! End-to-end runs of the `shintani` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shintani"))
        .args(args)
        .env("SHINTANI_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn rational_lerch_json() {
    let o = run(&["lerch", "--rational", "--conductor", "2", "--xi", "1", "-k", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["level"], 1);
    assert_eq!(v["coeffs"], serde_json::json!(["-1/4"]));
    assert_eq!(v["field"], "Q");
    assert_eq!(v["k"], 1);
    assert_eq!(v["fan_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["lerch", "--disc", "5", "--conductor", "3", "--xi", "1,2", "-k", "2", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn hecke_from_norm() {
    let o = run(&["hecke", "--disc", "5", "--char-norm", "3:1", "-k", "0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coeffs"], serde_json::json!(["2/3"]));
}

#[test]
fn selfcheck_passes() {
    assert_eq!(run(&["selfcheck"]).status.code(), Some(0));
}

#[test]
fn cocycle_verification_passes() {
    let o = run(&["verify", "cocycle", "--disc", "5", "--trials", "200", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(run(&["lerch", "--disc", "7", "--conductor", "2", "--xi", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["lerch", "--conductor", "2", "--xi", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn pole_is_rejected() {
    // xi is trivial at the generator 1 of the cone
    let o = run(&["shintani", "--disc", "5", "--conductor", "2", "--xi", "0,1", "--cone", "1;1+w", "-k", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole"));
    let ok = run(&["shintani", "--disc", "5", "--conductor", "2", "--xi", "1,0", "--cone", "1;1+w", "-k", "0"]);
    assert_eq!(ok.status.code(), Some(0));
}
