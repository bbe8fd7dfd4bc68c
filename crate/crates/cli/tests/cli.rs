//! End-to-end checks of the `deterrence` binary: exit codes, report files,
//! config resolution, and the reproducibility contract.

use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deterrence"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parse {}: {e}", path.display()))
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["--version"][..], &["cutoff", "--help"][..]] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn bad_invocations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_cmd = run(dir.path(), &["nosuchcommand"]);
    assert_eq!(unknown_cmd.status.code(), Some(1));

    let missing_config = run(dir.path(), &["corner", "--config", "absent.json"]);
    assert_eq!(missing_config.status.code(), Some(1));
    assert!(stderr(&missing_config).contains("absent.json"));

    fs::write(dir.path().join("unknown.json"), r#"{"model": {"providers": 5}}"#).unwrap();
    let unknown_field = run(dir.path(), &["corner", "--config", "unknown.json"]);
    assert_eq!(unknown_field.status.code(), Some(1));
    assert!(stderr(&unknown_field).contains("providers"), "{}", stderr(&unknown_field));

    fs::write(dir.path().join("both.json"), r#"{"model": {"q": 0.05, "p_k": 0.15}}"#).unwrap();
    let both = run(dir.path(), &["corner", "--config", "both.json"]);
    assert_eq!(both.status.code(), Some(1));
    assert!(stderr(&both).contains("mutually exclusive"), "{}", stderr(&both));

    fs::write(dir.path().join("theta.json"), r#"{"sim": {"theta": 70.0}}"#).unwrap();
    let theta = run(dir.path(), &["simulate", "--seed", "1", "--config", "theta.json"]);
    assert_eq!(theta.status.code(), Some(1));
    assert!(stderr(&theta).contains("dispersed"), "{}", stderr(&theta));
}

#[test]
fn corner_flags_follow_the_custodied_stock() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("zero.json"), r#"{"model": {"v": 0.0}}"#).unwrap();
    let out = run(dir.path(), &["corner", "--config", "zero.json", "--out", "z"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = read_json(&dir.path().join("z/corner.json"));
    assert_eq!(report["result"]["no_join_is_equilibrium"], Value::Bool(true));
    assert_eq!(report["result"]["all_join_is_equilibrium"], Value::Bool(false));
    assert!(report["result"]["u_join_at_one"].as_f64().unwrap() < 0.0);

    fs::write(dir.path().join("big.json"), r#"{"model": {"v": 5000.0}}"#).unwrap();
    let out = run(dir.path(), &["corner", "--config", "big.json", "--out", "b"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("b/corner.json"));
    assert_eq!(report["result"]["all_join_is_equilibrium"], Value::Bool(true));
}

#[test]
fn simulate_without_a_seed_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("seed"), "{}", stderr(&out));

    // A config-level seed is enough.
    fs::write(dir.path().join("seeded.json"), r#"{"seed": 11, "sim": {"replications": 200}}"#)
        .unwrap();
    let out = run(dir.path(), &["simulate", "--config", "seeded.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = read_json(&dir.path().join("out/simulate.json"));
    assert_eq!(report["config"]["seed"], Value::from(11u64));
}

#[test]
fn simulate_reruns_are_byte_identical_and_seeds_matter() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--seed", "42"];
    let first = run(dir.path(), &[&args[..], &["--out", "a"]].concat());
    let second = run(dir.path(), &[&args[..], &["--out", "b"]].concat());
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(second.status.code(), Some(0));
    let a = fs::read(dir.path().join("a/simulate.json")).unwrap();
    let b = fs::read(dir.path().join("b/simulate.json")).unwrap();
    assert_eq!(a, b, "same seed must reproduce the report byte for byte");

    let other = run(dir.path(), &["simulate", "--seed", "43", "--out", "c"]);
    assert_eq!(other.status.code(), Some(0));
    let c = fs::read(dir.path().join("c/simulate.json")).unwrap();
    assert_ne!(a, c, "a different seed must change the sample");
}

#[test]
fn report_config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    // Nontrivial settings so the echo has work to do.
    fs::write(
        dir.path().join("study.json"),
        r#"{
            "model": {"n": 7, "p_k": 0.22, "beta": 0.05, "sanctions": {"zipf": 400.0}},
            "sim": {"replications": 5000, "strategy": {"join_prob": 0.6}}
        }"#,
    )
    .unwrap();
    let first = run(
        dir.path(),
        &["simulate", "--config", "study.json", "--seed", "9", "--out", "a"],
    );
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));

    // The embedded config is itself a valid config file for the same run.
    let report = read_json(&dir.path().join("a/simulate.json"));
    fs::write(dir.path().join("echo.json"), report["config"].to_string()).unwrap();
    let second = run(dir.path(), &["simulate", "--config", "echo.json", "--out", "b"]);
    assert_eq!(second.status.code(), Some(0), "{}", stderr(&second));
    let a = fs::read(dir.path().join("a/simulate.json")).unwrap();
    let b = fs::read(dir.path().join("b/simulate.json")).unwrap();
    assert_eq!(a, b, "the config echo must reproduce the identical report");
}

#[test]
fn cutoff_corners_write_reports_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // Full attempt-stage exposure deters joining at every signal under the
    // default wide prior.
    fs::write(
        dir.path().join("deterred.json"),
        r#"{"global_game": {"pre_coordination_size": 2}}"#,
    )
    .unwrap();
    let out = run(dir.path(), &["cutoff", "--config", "deterred.json"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stdout(&out).contains("always deterred"), "{}", stdout(&out));
    let report = read_json(&dir.path().join("out/cutoff.json"));
    let max = report["result"]["always_deterred"]["max_conditional_payoff"].as_f64().unwrap();
    assert!(max < 0.0);

    // A solver-setting problem is a validation error, not a solver failure.
    fs::write(
        dir.path().join("badsolver.json"),
        r#"{"global_game": {"solver": {"quadrature_nodes": 0}}}"#,
    )
    .unwrap();
    let bad = run(dir.path(), &["cutoff", "--config", "badsolver.json"]);
    assert_eq!(bad.status.code(), Some(1), "{}", stderr(&bad));
}

#[test]
fn solved_cutoff_report_has_the_solution_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["cutoff"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = read_json(&dir.path().join("out/cutoff.json"));
    let solved = &report["result"]["solved"];
    assert!(solved["tau"].is_f64());
    assert!(solved["residual"].as_f64().unwrap().abs() <= 1e-8);
    assert!(solved["theta_star"].is_f64());
    // Echo carries the resolved game so the run is reproducible.
    assert!(report["config"]["global_game"]["sigma"].is_f64());
    assert!(report["config"]["global_game"]["prior"]["normal"]["mean"].is_f64());
}

#[test]
fn tabular_csv_headers_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let tornado = run(dir.path(), &["tornado", "--format", "csv"]);
    assert_eq!(tornado.status.code(), Some(0), "{}", stderr(&tornado));
    let text = fs::read_to_string(dir.path().join("out/tornado.csv")).unwrap();
    assert!(
        text.starts_with("parameter,low_value,low_metric,high_value,high_metric,baseline_metric\n"),
        "{text}"
    );
    assert_eq!(text.lines().count(), 5, "four parameter rows expected:\n{text}");

    let iso = run(dir.path(), &["iso", "--format", "csv"]);
    assert_eq!(iso.status.code(), Some(0), "{}", stderr(&iso));
    let text = fs::read_to_string(dir.path().join("out/iso.csv")).unwrap();
    assert!(text.starts_with("level,beta,p_k\n"), "{text}");
    assert!(text.lines().count() > 10, "contour points expected:\n{text}");
}

#[test]
fn key_value_csv_covers_scalar_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["vsafe", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("out/vsafe.csv")).unwrap();
    assert!(text.starts_with("key,value\n"), "{text}");
    assert!(text.contains("config.model.n,5"), "{text}");
    assert!(text.contains("result.v_safe_billions,1.19117647e3"), "{text}");
}

#[test]
fn calibrate_prints_the_headline_number() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["calibrate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("V_safe ≈ $1.19T"), "{}", stdout(&out));
    let report = read_json(&dir.path().join("out/calibrate.json"));
    assert!(report["result"]["v_safe_by_beta"].as_array().unwrap().len() == 3);
}

#[test]
fn every_json_report_embeds_a_reparseable_config() {
    let dir = tempfile::tempdir().unwrap();
    let commands: &[&[&str]] = &[
        &["corner"],
        &["thresholds"],
        &["vsafe"],
        &["cutoff"],
        &["simulate", "--seed", "3"],
        &["tornado"],
        &["iso"],
        &["calibrate"],
    ];
    for args in commands {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        let name = format!("out/{}.json", args[0]);
        let report = read_json(&dir.path().join(&name));
        assert!(report["config"].is_object(), "{name} lacks a config echo");
        assert!(report["result"].is_object(), "{name} lacks a result");
        // Feeding the echo back must at least parse and validate.
        fs::write(dir.path().join("echo.json"), report["config"].to_string()).unwrap();
        let echoed = run(
            dir.path(),
            &[args[0], "--config", "echo.json", "--out", "echoed", "--seed", "3"],
        );
        assert_eq!(echoed.status.code(), Some(0), "{name} echo rejected: {}", stderr(&echoed));
    }
}
