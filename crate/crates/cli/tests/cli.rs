use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nlwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlwave")).args(args).env("NLWAVE_WORKERS", "2").output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn series_check_passes_with_the_expected_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("series");
    let o = nlwave(&["series-check", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(out.join("series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("quantity,order,fitted,expected,rel_err"));
    let row = lines.find(|l| l.starts_with("c+4d/3,-1,")).unwrap();
    let fitted: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((fitted - 7.0).abs() < 7e-3);
    let rep = report(&out);
    assert_eq!(rep["passed"], Value::Bool(true));
    assert!(rep["verdicts"].as_array().unwrap().iter().all(|v| v["tolerance"].is_number()));
    assert!(out.join("timing.json").exists());
}

#[test]
fn recover_lower_fixture_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rec");
    let o = nlwave(&["recover", "--out", out.to_str().unwrap(), "--seed", "3"]);
    assert!(o.status.success());
    let rep = report(&out);
    assert_eq!(rep["config"]["kind"], "recover-lower");
    let fixture = &rep["results"]["cases"][0];
    assert_eq!(fixture["truth"], serde_json::json!([0.3, -1.2, 2.5]));
    assert!(fixture["max_abs_err"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn recover_higher_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("higher");
    let o = nlwave(&["recover", "--mode", "higher", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(report(&out)["config"]["kind"], "recover-higher");
}

#[test]
fn forward_with_zero_data_gives_zero_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "fwd.json", r#"{"parameters": {"cells": [50], "source": {"kind": "zero"}}}"#);
    let out = tmp.path().join("fwd");
    let o = nlwave(&["forward", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let rep = report(&out);
    assert_eq!(rep["results"]["field_max"], 0.0);
    assert!(rep["verdicts"].as_array().unwrap().iter().any(|v| v["name"].as_str().unwrap().starts_with("zero data")));
    assert!(out.join("field.csv").exists() && out.join("dn_trace.csv").exists());
}

#[test]
fn identical_runs_give_identical_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "rec.json", r#"{"parameters": {"random_profiles": 12}, "seed": 42}"#);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        assert!(nlwave(&["recover", "--config", &cfg, "--out", dir.to_str().unwrap()]).status.success());
    }
    // the echo names the output directory, so compare with it removed
    let strip = |dir: &Path| {
        let mut v = report(dir);
        v["config"]["output_dir"] = Value::Null;
        serde_json::to_vec_pretty(&v).unwrap()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(fs::read(a.join("recover_lower.csv")).unwrap(), fs::read(b.join("recover_lower.csv")).unwrap());

    // same out dir twice: the file itself is byte-identical
    let first = fs::read(a.join("report.json")).unwrap();
    assert!(nlwave(&["recover", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert_eq!(first, fs::read(a.join("report.json")).unwrap());
}

#[test]
fn failed_verdict_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "tight.json", r#"{"parameters": {"tolerance": 1e-15}}"#);
    let out = tmp.path().join("tight");
    let o = nlwave(&["series-check", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&out)["passed"], Value::Bool(false));
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL]"));
}

#[test]
fn module_errors_are_embedded_and_fail_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "loud.json",
        r#"{"parameters": {"cells": [50], "source": {"kind": "pulse", "amplitude": 0.5, "start": 0.1, "width": 0.3}}}"#,
    );
    let out = tmp.path().join("loud");
    let o = nlwave(&["forward", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(report(&out)["error"].as_str().unwrap().starts_with("solve_nonlinear"));
}

#[test]
fn schema_errors_exit_with_two_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let cfg = write_config(tmp.path(), "typo.json", r#"{"parameters": {"pionts": 30}}"#);
    let o = nlwave(&["series-check", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pionts"));
    assert!(!out.exists());

    let cfg = write_config(tmp.path(), "kind.json", r#"{"kind": "trace"}"#);
    assert_eq!(nlwave(&["forward", "--config", &cfg]).status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_nlwave")).args(["series-check"]).env("NLWAVE_WORKERS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_replays_through_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let cfg = write_config(tmp.path(), "t.json", r#"{"parameters": {"random": {"count": 3, "ds": 0.001, "max_s": 1.0}}, "seed": 5}"#);
    assert!(nlwave(&["trace", "--config", &cfg, "--out", first.to_str().unwrap()]).status.success());
    let second = tmp.path().join("second");
    let echo = first.join("report.json");
    assert!(nlwave(&["run", "--config", echo.to_str().unwrap(), "--out", second.to_str().unwrap()]).status.success());
    assert_eq!(report(&first)["results"], report(&second)["results"]);
    assert!(second.join("path_6.csv").exists());
}

#[test]
fn small_linearize_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "lin.json", r#"{"parameters": {"cells": 100, "patterns": [[1, 1, 0, 0], [1, 1, 1, 0]]}}"#);
    let out = tmp.path().join("lin");
    let o = nlwave(&["linearize", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(out.join("linearize.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
}

#[test]
fn flowout_with_two_crossing_fans() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "fans.json",
        r#"{"parameters": {
            "metric": {"dim": 2, "speed": {"kind": "constant", "c": 1.0},
                       "domain": {"kind": "box", "lower": [-1.0, -1.0], "upper": [1.0, 1.0]}},
            "fans": [
                {"x0": [0.0, -0.5, 0.0], "direction": [1.0, 0.0], "aperture": 0.1, "fan_count": 5, "ds": 0.01, "max_s": 1.5},
                {"x0": [0.0, 0.0, -0.5], "direction": [0.0, 1.0], "aperture": 0.1, "fan_count": 5, "ds": 0.01, "max_s": 1.5}
            ],
            "expect_interior": true}}"#,
    );
    let out = tmp.path().join("fans");
    let o = nlwave(&["flowout", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let rep = report(&out);
    assert_eq!(rep["results"]["intersections"]["points"].as_array().unwrap().len(), 5);
    assert!(out.join("intersections.csv").exists() && out.join("fans.csv").exists());
}
