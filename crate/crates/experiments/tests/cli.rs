//! End-to-end runs of the `kcut` binary: exit codes and output files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SQUARE: &str = "n 4 k 2\nsigma 1 1 2 2\n0 1\n1 2\n2 3\n3 0\n";

fn kcut(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kcut"))
        .current_dir(dir)
        .args(args)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .expect("binary runs")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("square.txt"), SQUARE).unwrap();
    dir
}

#[test]
fn solve_reports_the_optimum() {
    let dir = setup();
    let out = kcut(dir.path(), &["solve", "--graph", "square.txt", "--enumerate-all"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["best_value"], 4);
    assert_eq!(v["count_labeled"], 2);
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_qse_exit_codes_follow_the_outcome() {
    let dir = setup();
    let cert = dir.path().join("cert.json");
    let out = kcut(dir.path(), &["verify-qse", "--graph", "square.txt", "--emit-certificate", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["result"]["outcome"], "found");
    assert_eq!(v["result"]["coalition"], serde_json::json!([0, 3]));
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);

    let out = kcut(dir.path(), &["verify-qse", "--graph", "square.txt", "--from-solver", "--pruning", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn coloring_files_accept_plain_lists() {
    let dir = setup();
    std::fs::write(dir.path().join("col.txt"), "1 2 1 2\n").unwrap();
    let out = kcut(dir.path(), &["verify-qse", "--graph", "square.txt", "--coloring", "col.txt", "--q", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn errors_exit_with_one() {
    let dir = setup();
    let out = kcut(dir.path(), &["solve", "--graph", "missing.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    std::fs::write(dir.path().join("loop.txt"), "n 2\n0 0\n").unwrap();
    assert_eq!(kcut(dir.path(), &["solve", "--graph", "loop.txt", "--k", "2"]).status.code(), Some(1));
}

#[test]
fn experiments_write_reports() {
    let dir = setup();
    assert_eq!(kcut(dir.path(), &["figure1"]).status.code(), Some(0));
    assert_eq!(kcut(dir.path(), &["table1"]).status.code(), Some(0));
    assert_eq!(kcut(dir.path(), &["triangle-claim"]).status.code(), Some(0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/figure1.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "figure1");
    assert_eq!(report["config_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn triangle_claim_fails_below_the_threshold() {
    let dir = setup();
    let out = kcut(dir.path(), &["triangle-claim", "--n", "5", "--m", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_er_run_emits_csv() {
    let dir = setup();
    let args = ["er-experiment", "--n", "8", "--avg-degrees", "2,4", "--graphs-per-degree", "2"];
    assert_eq!(kcut(dir.path(), &args).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("out/er_histogram.csv")).unwrap();
    assert!(csv.starts_with("size,avg_degree_2,avg_degree_4,all\n"));
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = setup();
    std::fs::write(dir.path().join("kcut.toml"), "[fuzz]\ncount = 50\nexhaustive_max_n = 2\n").unwrap();
    let out = kcut(dir.path(), &["--config", "kcut.toml", "identity-fuzz", "--count", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/identity-fuzz.json")).unwrap()).unwrap();
    assert_eq!(report["stats"]["random_instances"], 20);
    assert_eq!(report["config"]["exhaustive_max_n"], 2);
}

#[test]
fn single_instance_dynamics_writes_a_trace() {
    let dir = setup();
    let trace = dir.path().join("trace.json");
    let out = kcut(dir.path(), &["dynamics", "--graph", "square.txt", "--trace-out", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(v["terminal"], "converged");
}
