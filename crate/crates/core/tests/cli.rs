//! The `mixmean` binary end to end.

use std::process::{Command, Output};

use serde_json::Value;

fn mixmean(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixmean"))
        .args(args)
        .env_remove("MIXMEAN_CI")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn compute_prints_exact_and_bounded_values() {
    let out = mixmean(&["compute", "--mean", "power", "--q", "1/2,1/2", "--x", "1,3", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "2 (exact)");

    let out = mixmean(&["compute", "--mean", "symmetric", "--x", "1,2,3", "--r", "2"]);
    let text = stdout(&out);
    assert!(text.starts_with("1.914854"), "{text}");
    let exp: i64 = text.trim().rsplit("2^").next().unwrap().parse().unwrap();
    assert!(exp <= -120, "{text}");

    let out = mixmean(&["compute", "--mean", "hardy-sum", "--x", "1,2"]);
    assert_eq!(stdout(&out).trim(), "5/2 (exact)");

    let out = mixmean(&["compute", "--mean", "mixed", "--x", "1,2", "--r", "1", "--s", "geo"]);
    assert!(stdout(&out).starts_with("1.224744871"));
}

#[test]
fn bad_input_exits_two() {
    for args in [
        vec!["compute", "--mean", "power", "--x", "1,-2"],
        vec!["compute", "--mean", "cubic", "--x", "1"],
        vec!["verify", "--ineq", "nope"],
        vec!["verify", "--ineq", "nanjundiah", "--r", "geo", "--s", "1"],
        vec!["verify", "--ineq", "nanjundiah", "--dist", "gaussian"],
        vec!["optimize", "--target", "hardy-ratio"],
        vec![],
    ] {
        let out = mixmean(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_eq33_is_exact_and_clean() {
    let out = mixmean(&["verify", "--ineq", "eq33", "--i-max", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["violated"], 0);
    assert_eq!(v["trials"], 9999);
    assert_eq!(v["equality"], 1);
    assert_eq!(v["worst_instance"]["params"]["i"], "2");
}

#[test]
fn verify_theorem_and_identity_suites() {
    let out = mixmean(&["verify", "--ineq", "nanjundiah", "--trials", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["violated"], 0);
    assert_eq!(v["trials"], 1000);
    for key in ["inequality", "trials", "holds", "equality", "violated", "indeterminate", "worst_margin", "worst_instance", "config"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let out = mixmean(&["verify", "--ineq", "identity16", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["equality"], 100);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["verify", "--ineq", "tarnavas", "--trials", "50", "--seed", "3", "--f", "exp", "--weights", "nanjundiah"];
    let (a, b) = (mixmean(&args), mixmean(&args));
    assert_eq!(a.stdout, b.stdout);
    let other = mixmean(&["verify", "--ineq", "tarnavas", "--trials", "50", "--seed", "4", "--f", "exp", "--weights", "nanjundiah"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn worst_instance_replays_to_the_same_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = mixmean(&[
        "verify", "--ineq", "holland", "--trials", "40", "--seed", "5", "--weights", "holland-only", "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved, json(&out));
    let inst = dir.path().join("instance.json");
    std::fs::write(&inst, saved["worst_instance"].to_string()).unwrap();
    let replayed = mixmean(&["verify", "--ineq", "holland", "--replay", inst.to_str().unwrap()]);
    let v = json(&replayed);
    assert_eq!(v["trials"], 1);
    assert_eq!(v["worst_verdict"], saved["worst_verdict"]);
    assert_eq!(v["worst_margin"], saved["worst_margin"]);
}

#[test]
fn report_only_suites_exit_zero_with_violations() {
    let out = mixmean(&["search", "--ineq", "general-mixed", "--budget", "200", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["violated"].as_u64().unwrap() > 0);
    assert_eq!(v["report_only"], true);

    let out = mixmean(&["search", "--ineq", "open-question", "--n-max", "8", "--budget", "10000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report_only"], true);
    assert_eq!(v["violations"].as_array().unwrap().len() as u64, v["violated"].as_u64().unwrap());
}

#[test]
fn ci_mode_requires_a_seed() {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_mixmean"))
            .args(args)
            .env("MIXMEAN_CI", "1")
            .output()
            .unwrap()
    };
    assert_eq!(run(&["verify", "--ineq", "rado", "--trials", "5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--ineq", "rado", "--trials", "5", "--seed", "9"]).status.code(), Some(0));
    assert_eq!(run(&["optimize", "--target", "rado-gap", "--n", "3", "--budget", "20"]).status.code(), Some(2));
}

#[test]
fn optimize_reaches_the_small_supremum_and_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = mixmean(&[
        "optimize", "--target", "hardy-ratio", "--n", "2", "--budget", "1000", "--seed", "1", "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["best_f64"].as_f64().unwrap() >= 1.49);
    assert_eq!(v["threshold_exceeded"], 0);
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,best,hash"));
    let best: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(best.windows(2).all(|p| p[0] <= p[1]));
}

#[test]
fn optimize_large_n_stays_between_two_and_three() {
    let out = mixmean(&["optimize", "--target", "hardy-ratio", "--n", "1000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let best = json(&out)["best_f64"].as_f64().unwrap();
    assert!(best > 2.0 && best < 3.0, "{best}");
}
