//! End-to-end runs of the `msncap` binary.

use std::path::Path;
use std::process::{Command, Output};

fn msncap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msncap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const TRIANGLE: &str = r#"{"schema_version":1,"n":3,"kind":"rcmsn","events":[[1,2],[1,3],[2,3]]}"#;

#[test]
fn capacity_of_three_lines() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "t.json", TRIANGLE);
    let out = msncap(&["capacity", "--input", &input, "--per-event"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "8/9 ≈ 0.8888888889\n3 3 2\n");

    let out = msncap(&["capacity", "--input", &input, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["capacity"], "8/9");
}

#[test]
fn arrangement_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"schema_version":1,"lines":[
        {"slope":"0","intercept":"0"},{"slope":"1","intercept":"1/2"},{"slope":"-2","intercept":"3"}]}"#;
    let input = write(dir.path(), "a.json", body);
    let out = msncap(&["capacity", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("8/9"));
}

#[test]
fn malformed_inputs_exit_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(msncap(&["capacity", "--input", &bad]).status.code(), Some(2));

    let wrong_version = write(dir.path(), "v.json", &TRIANGLE.replace("\"schema_version\":1", "\"schema_version\":7"));
    assert_eq!(msncap(&["capacity", "--input", &wrong_version]).status.code(), Some(2));

    let bad_event = write(dir.path(), "e.json", &TRIANGLE.replace("[2,3]", "[2,2]"));
    assert_eq!(msncap(&["capacity", "--input", &bad_event]).status.code(), Some(2));

    assert_eq!(msncap(&["capacity"]).status.code(), Some(2));
    assert_eq!(msncap(&["--help"]).status.code(), Some(0));
}

#[test]
fn construct_writes_checked_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("o4.json");
    let out = msncap(&["construct", "--kind", "opt4", "--n", "5", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o4.json.report.json")).unwrap()).unwrap();
    assert_eq!(report["capacity"], "13/15");
    assert_eq!(report["check"], "pass");

    // The written arrangement reads back to the same capacity.
    let again = msncap(&["capacity", "--input", out_path.to_str().unwrap()]);
    assert!(stdout(&again).starts_with("13/15"), "{}", stdout(&again));
}

#[test]
fn realize_exit_codes_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "t.json", TRIANGLE);
    let witness = dir.path().join("w.json");
    let yes = msncap(&["realize", "--input", &input, "--max-slopes", "3", "--witness", witness.to_str().unwrap()]);
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).starts_with("realizable"));
    let back = msncap(&["capacity", "--input", witness.to_str().unwrap(), "--per-event"]);
    assert_eq!(stdout(&back), "8/9 ≈ 0.8888888889\n3 3 2\n");

    let no = msncap(&["realize", "--input", &input, "--max-slopes", "2"]);
    assert_eq!(no.status.code(), Some(1));
    assert!(stdout(&no).contains("class-count"));

    let given = msncap(&["realize", "--input", &input, "--slopes", "0,1,-1"]);
    assert_eq!(given.status.code(), Some(0));

    assert_eq!(msncap(&["realize", "--input", &input]).status.code(), Some(2));
}

#[test]
fn estimates_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trials.csv");
    let args = ["estimate", "--model", "rgmsn", "--n", "12", "--s", "3", "--trials", "6", "--seed", "9", "--json"];
    let a = msncap(&args);
    let b = msncap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let with_csv = msncap(&[&args[..11], &["--csv", csv.to_str().unwrap()]].concat());
    assert_eq!(with_csv.status.code(), Some(0));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().next(), Some("trial,capacity"));
    assert_eq!(rows.lines().count(), 7);
}

#[test]
fn formula_values() {
    let out = msncap(&["formula", "--name", "max4", "--n", "6"]);
    assert_eq!(stdout(&out), "34/39 ≈ 0.8717948718\n");
    let out = msncap(&["formula", "--name", "no-such-formula"]);
    assert_eq!(out.status.code(), Some(2));
}
