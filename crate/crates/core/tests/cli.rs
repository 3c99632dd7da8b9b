use std::process::{Command, Output};

use serde_json::Value;

fn dirac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ccr_gaussian_succeeds() {
    let out = dirac(&["ccr", "--chain", "doubling:4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["command"], "ccr");
    assert_eq!(doc["state"], "gaussian");
    assert_eq!(doc["strictly_decreasing"], true);
    assert_eq!(doc["report"]["points"].as_array().map(Vec::len), Some(4));
    assert_eq!(doc["config"]["hbar_over_2pi"], "1/6");
}

#[test]
fn ccr_uniform_reports_without_failing() {
    let out = dirac(&["ccr", "--state", "uniform", "--chain", "doubling:4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["well_defined"], false);
}

#[test]
fn bad_rational_is_a_usage_error() {
    let out = dirac(&["ccr", "--hbar-over-2pi", "1/0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("dirac: "));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(dirac(&["ccr", "--bogus"]).status.code(), Some(2));
    assert_eq!(dirac(&["ccr", "--chain", "weekly:3"]).status.code(), Some(2));
}

#[test]
fn restriction_blocks() {
    let out = dirac(&["restrict", "--hbar-over-2pi", "1/3", "--parent-a", "1/2", "--parent-b", "1/2", "--sub-a", "1", "--sub-b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["block_count"], 4);
    assert_eq!(doc["total_dimension"], 12);
    assert!(doc["blocks"].as_array().unwrap().iter().all(|b| b["dimension"] == 3));
}

#[test]
fn non_subalgebra_is_a_usage_error() {
    let out = dirac(&["restrict", "--parent-a", "1", "--parent-b", "1", "--sub-a", "1/2", "--sub-b", "1/3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gauss_csv_table() {
    let out = dirac(&["gauss", "--n", "12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,N_or_p,q,value_re,value_im,abs_diff,closed_form_used"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!((row[0], row[1]), ("quadratic", "12"));
    assert!(row[5].parse::<f64>().unwrap() < 1e-9);
    assert_eq!(lines.next(), None);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = dirac(&["gauss", "--random", "5", "--seed", "3"]);
    let b = dirac(&["gauss", "--random", "5", "--seed", "3"]);
    let c = dirac(&["gauss", "--random", "5", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(json(&a)["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# shallow run\nchain = doubling:3\nhbar_over_2pi = 1/3\n").unwrap();
    let path = cfg.to_str().unwrap();
    let doc = json(&dirac(&["ccr", "--config", path]));
    assert_eq!(doc["config"]["chain"], "doubling:3");
    assert_eq!(doc["config"]["hbar_over_2pi"], "1/3");
    let doc = json(&dirac(&["ccr", "--config", path, "--chain", "doubling:2"]));
    assert_eq!(doc["config"]["chain"], "doubling:2");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(dirac(&["ccr", "--config", path]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("g.json");
    let out = dirac(&["gauss", "--p", "3", "--q", "5", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert!(doc["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn eval_constant_and_errors() {
    let out = dirac(&["eval", "--expr", "2 + 3*i", "--chain", "doubling:4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["report"]["well_defined"], true);
    assert_eq!(doc["expression"], "2 + 3*i");

    let syntax = dirac(&["eval", "--expr", "<0| |0>"]);
    assert_eq!(syntax.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&syntax.stderr).contains("at 1:5"));
    assert_eq!(dirac(&["eval", "--expr", "<x|Q|0>"]).status.code(), Some(2));
    assert_eq!(dirac(&["eval", "--expr", "trace(exp(i*U))"]).status.code(), Some(2));
}

#[test]
fn eval_reads_expression_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("e.dirac");
    std::fs::write(&file, "<x| Q |x>\n").unwrap();
    let out = dirac(&["eval", "--expr-file", file.to_str().unwrap(), "--x", "0", "--chain", "doubling:3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["bindings"]["x"], 0.0);
}

#[test]
fn propagator_reports_the_oracle() {
    let out = dirac(&["propagator", "--kind", "harmonic", "--x", "-0.5", "--chain", "doubling:3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["kind"], "harmonic");
    assert_eq!(doc["x"], -0.5);
    assert_eq!(doc["report"]["oracle"]["name"], "Mehler kernel");
}

#[test]
fn trace_emits_the_comparison() {
    let out = dirac(&["trace", "--chain", "doubling:3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["comparison"]["matches"], "undetermined");
    assert!((doc["comparison"]["printed_formula"]["value"]["im"].as_f64().unwrap() + 2.0858296).abs() < 1e-6);
    assert!(doc["full_space"]["points"].is_array());
    assert_eq!(dirac(&["trace", "--epsilons", "0.1,-1,0.2"]).status.code(), Some(2));
}
