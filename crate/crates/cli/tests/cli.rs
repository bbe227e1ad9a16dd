use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercause"))
        .args(args)
        .current_dir(examples())
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

const SYSTEM: &str = "running_example.machine.json";
const FORMULA: &str = "formulas/running_example.hltl";
const TRACES: &str = "running_example.traces.json";

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn cause_events(report: &Value) -> Vec<Value> {
    let mut v: Vec<Value> = report["causes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["events"].clone())
        .collect();
    v.sort_by_key(|e| e.to_string());
    v
}

#[test]
fn explain_all_reports_two_verified_causes() {
    let out = run(&["explain", "--system", SYSTEM, "--formula", FORMULA, "--counterexample", TRACES, "--all"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["format"], 1);
    assert_eq!(r["status"], "found");
    let causes = r["causes"].as_array().unwrap();
    assert_eq!(causes.len(), 2);
    assert!(causes.iter().all(|c| c["verified"] == true));
    assert!(r.get("oracle").is_none());
}

#[test]
fn explain_and_oracle_agree_on_causes() {
    let args = ["--system", SYSTEM, "--formula", FORMULA, "--counterexample", TRACES];
    let explain = run(&[&["explain", "--all"][..], &args].concat());
    let oracle = run(&[&["oracle"][..], &args].concat());
    assert_eq!(oracle.status.code(), Some(0));
    let o = json(&oracle);
    assert_eq!(o["oracle"], true);
    assert_eq!(
        serde_json::to_string(&cause_events(&json(&explain))).unwrap(),
        serde_json::to_string(&cause_events(&o)).unwrap()
    );
}

#[test]
fn explain_without_counterexample_runs_the_checker() {
    let out = run(&["explain", "--system", SYSTEM, "--formula", FORMULA, "--prefix-bound", "3", "--period-bound", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "found");
}

#[test]
fn check_output_feeds_explain() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check", "--system", SYSTEM, "--formula", FORMULA]);
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("cex.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let again = run(&["explain", "--system", SYSTEM, "--formula", FORMULA, "--counterexample", path.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
}

#[test]
fn satisfied_formula_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.hltl");
    std::fs::write(&f, "forall t1 t2. G (ho[t1] -> X ho[t1])").unwrap();
    let out = run(&["check", "--system", SYSTEM, "--formula", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no violation found within bounds"));
}

#[test]
fn malformed_files_exit_two_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, "{\"format\": 1,\n\"inputs\": [\"hi\"],\n\"states\": [}").unwrap();
    let out = run(&["validate", "--system", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3:12"), "{}", String::from_utf8_lossy(&out.stderr));

    let f = dir.path().join("f.hltl");
    std::fs::write(&f, "forall t1 t2. G (lo[t1] <-> )").unwrap();
    let out = run(&["explain", "--system", SYSTEM, "--formula", f.to_str().unwrap(), "--counterexample", TRACES]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["explain", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cause_size_cap_exits_three() {
    let out = run(&[
        "explain", "--system", SYSTEM, "--formula", FORMULA, "--counterexample", TRACES, "--all", "--max-cause-size", "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "bounded-out");
}

#[test]
fn candidates_and_text_markers() {
    let out = run(&["candidates", "--system", SYSTEM, "--formula", FORMULA, "--counterexample", TRACES]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["candidate"]["events"].as_array().unwrap().len(), 3);

    let out = run(&[
        "explain", "--system", SYSTEM, "--formula", FORMULA, "--counterexample", TRACES, "--all", "--format", "text",
        "--seed", "7",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("{[*]!hi} {lo} ({ho,lo})^w"), "{text}");
    assert!(text.contains("[~]lo"), "{text}");
    assert!(!text.contains('\x1b'));
}

#[test]
fn seed_is_recorded_and_dump_goes_to_stderr() {
    let out = run(&[
        "explain", "--system", SYSTEM, "--formula", FORMULA, "--counterexample", TRACES, "--seed", "42", "--dump-aa",
    ]);
    assert_eq!(json(&out)["stats"]["seed"], 42);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("automaton root=") && err.contains("run"), "{err}");
}

#[test]
fn validate_summarizes_inputs() {
    let out = run(&["validate", "--system", SYSTEM, "--formula", FORMULA, "--counterexample", TRACES]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("4 states") && text.contains("formula is violated"), "{text}");
}
