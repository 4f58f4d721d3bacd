//! Drives the `wtpc` binary through the whole pipeline on a synthetic corpus.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wtpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtpc")).args(args).output().expect("spawn wtpc")
}

fn ok(args: &[&str]) {
    let out = wtpc(args);
    assert!(out.status.success(), "wtpc {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn error_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr is not JSON: {}", String::from_utf8_lossy(&out.stderr)))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

/// simulate -> clean -> select -> enhance -> residuals -> arma -> forecast -> evaluate
fn pipeline(dir: &Path) {
    let d = |n: &str| p(dir, n);
    ok(&["simulate", "--seed", "9", "--n", "20000", "--out", &d("sim")]);
    ok(&["clean", "--data", &d("sim/training.csv"), "--out", &d("clean")]);
    ok(&["select", "--class", "spline", "--grid", "4..30", "--data", &d("clean/clean.csv"), "--out", &d("select")]);
    ok(&["enhance", "--model", &d("select/model.json"), "--data", &d("clean/clean.csv"), "--out", &d("enhance")]);
    ok(&["residuals", "--enhanced", &d("enhance/enhanced.json"), "--data", &d("clean/clean.csv"), "--out", &d("resid")]);
    ok(&[
        "arma", "--enhanced", &d("enhance/enhanced.json"), "--profile", &d("resid/profile.json"), "--q1", "1",
        "--q2", "0", "--data", &d("clean/clean.csv"), "--out", &d("arma"),
    ]);
    let validation = fs::read_to_string(dir.join("sim/validation.csv")).unwrap();
    let future: Vec<&str> = validation.lines().take(13).collect();
    fs::write(dir.join("future.csv"), future.join("\n") + "\n").unwrap();
    ok(&[
        "forecast", "--dynamic", &d("arma/dynamic_1_0.json"), "--data", &d("clean/clean.csv"), "--future",
        &d("future.csv"), "--out", &d("forecast"),
    ]);
    ok(&[
        "evaluate", "--model", &d("select/model.json"), "--enhanced", &d("enhance/enhanced.json"), "--dynamic",
        &d("arma/dynamic_1_0.json"), "--data", &d("sim/validation.csv"), "--horizons", "10,60,1000", "--out",
        &d("eval"),
    ]);
}

#[test]
fn full_pipeline_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path());
    let root = dir.path();
    for f in [
        "sim/truth.json", "clean/cleaning_report.json", "select/sweep.csv", "select/selection.json",
        "resid/profile.csv", "resid/residual_hist.csv", "eval/coverage.csv", "eval/summary.json",
        "eval/binned_stats.csv",
    ] {
        assert!(root.join(f).exists(), "{f} missing");
    }
    let sweep = fs::read_to_string(root.join("select/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("m,n_params,mse,bic"));
    assert_eq!(sweep.lines().count(), 28);

    let forecast = fs::read_to_string(root.join("forecast/forecast.csv")).unwrap();
    assert_eq!(forecast.lines().next(), Some("timestamp,p_hat,var,lo95,hi95"));
    assert_eq!(forecast.lines().count(), 13);

    assert_eq!(header(&root.join("eval/horizons.csv")), "horizon,steps,static,enhanced,arma_1_0");
    let rows: Vec<String> = fs::read_to_string(root.join("eval/horizons.csv")).unwrap().lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("60,6,"));

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(root.join("eval/summary.json")).unwrap()).unwrap();
    let fraction = summary["coverage"]["fraction"].as_f64().unwrap();
    assert!((0.9..=1.0).contains(&fraction), "coverage {fraction}");
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [a.path(), b.path()] {
        ok(&["simulate", "--seed", "3", "--n", "3000", "--out", &p(dir, "sim")]);
        ok(&["clean", "--data", &p(dir, "sim/training.csv"), "--out", &p(dir, "clean")]);
        ok(&["select", "--class", "polynomial", "--grid", "1..6", "--data", &p(dir, "clean/clean.csv"), "--out", &p(dir, "sel")]);
        ok(&["fit", "--class", "5pl", "--data", &p(dir, "clean/clean.csv"), "--out", &p(dir, "fit")]);
    }
    for f in [
        "sim/training.csv", "sim/validation.csv", "sim/truth.json", "clean/clean.csv", "clean/cleaning_report.json",
        "sel/sweep.csv", "sel/model.json", "fit/model.json", "fit/binned_stats.csv",
    ] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, format!("# synthetic run\nseed = 4\nn = 500\nout = {}\n", p(dir.path(), "sim"))).unwrap();
    ok(&["simulate", "--config", &cfg.display().to_string()]);
    let truth: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sim/truth.json")).unwrap()).unwrap();
    assert_eq!(truth["seed"], 4);
    assert_eq!(truth["n_samples"], 500);

    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = wtpc(&["simulate", "--config", &cfg.display().to_string()]);
    assert_eq!(out.status.code(), Some(9));
    assert_eq!(error_json(&out)["error"], "config");
}

#[test]
fn errors_are_reported_as_json_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| p(dir.path(), n);

    let out = wtpc(&["fit", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_json(&out);
    assert_eq!(e["exit_code"], 2);
    assert!(e["message"].as_str().unwrap().contains("--bogus"));

    let out = wtpc(&["clean", "--data", &d("nope.csv"), "--out", &d("o")]);
    assert_eq!(out.status.code(), Some(6));

    fs::write(dir.path().join("dup.csv"), "timestamp,wind,angle,temperature,power,state\n\
        2013-06-01T00:00,5.3,2.1,14.0,312.4,NORMAL\n\
        2013-06-01T00:10,5.4,2.0,14.0,320.0,NORMAL\n\
        2013-06-01T00:00,5.5,2.0,14.1,330.0,NORMAL\n").unwrap();
    let out = wtpc(&["clean", "--data", &d("dup.csv"), "--out", &d("o")]);
    assert_eq!(out.status.code(), Some(5));
    assert!(error_json(&out)["message"].as_str().unwrap().contains("2013-06-01T00:00"));

    fs::write(dir.path().join("cols.csv"), "timestamp,ws,angle,temperature,power,state\n").unwrap();
    let out = wtpc(&["clean", "--data", &d("cols.csv"), "--out", &d("o")]);
    assert_eq!(out.status.code(), Some(4));
    let out = wtpc(&["clean", "--data", &d("cols.csv"), "--schema", "wind=ws", "--out", &d("o")]);
    assert_ne!(out.status.code(), Some(4));

    let out = wtpc(&["simulate", "--n", "50", "--out", &d("dup.csv/sim")]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"], "io");

    let out = wtpc(&["evaluate", "--model", &d("missing.json"), "--data", &d("dup.csv"), "--out", &d("o")]);
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(error_json(&out)["error"], "missing_artifact");

    fs::write(dir.path().join("broken.json"), "{\"class\": 3}").unwrap();
    let out = wtpc(&["enhance", "--model", &d("broken.json"), "--data", &d("dup.csv"), "--out", &d("o")]);
    assert_eq!(out.status.code(), Some(7));

    ok(&["simulate", "--seed", "1", "--n", "300", "--out", &d("sim")]);
    let out = wtpc(&["fit", "--class", "polynomial", "--order", "0", "--data", &d("sim/training.csv"), "--out", &d("o")]);
    assert_eq!(out.status.code(), Some(8));
}

#[test]
fn help_lists_every_subcommand() {
    let out = wtpc(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["clean", "fit", "select", "enhance", "residuals", "arma", "forecast", "evaluate", "simulate"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}
