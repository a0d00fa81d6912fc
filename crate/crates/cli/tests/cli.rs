use std::path::Path;
use std::process::Command;

use multidir_cli::{BodySpec, ExperimentConfig, FunctionSpec};
use proptest::prelude::*;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multidir"))
}

/// Runs `multidir <args> --out <dir>` and returns the exit code.
fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let out = bin()
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs");
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn lagrange_on_linear_passes() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"command": "lagrange", "function": "linear", "body": "triangle"}"#);
    assert_eq!(run_in(d.path(), &["lagrange", "--config", &cfg]), 0);
    let r = report(d.path());
    assert_eq!(r["verified"], true);
    assert_eq!(r["outcome"]["kind"], "lagrange");
    assert!(d.path().join("trace.csv").exists());
    assert!(d.path().join("timings.json").exists());
}

#[test]
fn r_above_the_infimum_is_a_precondition_failure() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"function": "linear", "r": 100.0}"#);
    assert_eq!(run_in(d.path(), &["lagrange", "--config", &cfg]), 1);
    let r = report(d.path());
    assert_eq!(r["verified"], false);
    assert_eq!(r["error"]["kind"], "PreconditionFailed");
}

#[test]
fn failed_check_is_named_and_exits_one() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"function": "bowl", "apex": [0.5, 0.0]}"#);
    assert_eq!(run_in(d.path(), &["derivative", "--config", &cfg, "--tol", "0"]), 1);
    let r = report(d.path());
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["gradient_pairing"]);
}

#[test]
fn usage_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let bad_body = write_config(
        d.path(),
        r#"{"body": {"kind": "ball", "center": [3.0, 0.0], "radius": -1.0}}"#,
    );
    assert_eq!(run_in(d.path(), &["rolle", "--config", &bad_body]), 2);
    let not_json = write_config(d.path(), r#"{"body": {"kind": "ball""#);
    assert_eq!(run_in(d.path(), &["rolle", "--config", &not_json]), 2);
    let unknown_key = write_config(d.path(), r#"{"gird": 4}"#);
    assert_eq!(run_in(d.path(), &["rolle", "--config", &unknown_key]), 2);
    let mismatch = write_config(d.path(), r#"{"command": "dual"}"#);
    assert_eq!(run_in(d.path(), &["rolle", "--config", &mismatch]), 2);
    assert_eq!(run_in(d.path(), &["rolle", "--config", "/nonexistent/x.json"]), 2);
    assert_eq!(run_in(d.path(), &["rolle", "--grid", "0"]), 2);
    assert_eq!(run_in(d.path(), &["frobnicate"]), 2);
    assert!(!d.path().join("report.json").exists());
}

#[test]
fn every_single_command_passes_on_defaults() {
    for (cmd, trace) in [
        ("derivative", "trace.csv"),
        ("rolle", "trace.csv"),
        ("lagrange", "trace.csv"),
        ("dual", "bridge.csv"),
        ("bp-search", "orbit.csv"),
    ] {
        let d = tempfile::tempdir().unwrap();
        assert_eq!(run_in(d.path(), &[cmd]), 0, "{cmd}");
        let csv = std::fs::read_to_string(d.path().join(trace)).unwrap();
        assert!(csv.lines().count() > 1, "{cmd}");
    }
}

#[test]
fn trace_csv_columns() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_in(d.path(), &["derivative"]), 0);
    let csv = std::fs::read_to_string(d.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,t_k,inf_value,quotient"));
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn zero_tolerance_suite_fails_and_seed_keeps_the_matrix() {
    let (base, _, _) = multidir_cli::run_suite(0, 1e-6, 10);
    assert!(base.passed);
    let (zero, _, _) = multidir_cli::run_suite(0, 0.0, 10);
    assert!(!zero.passed);
    let (other, _, _) = multidir_cli::run_suite(7, 1e-6, 10);
    assert_eq!(base.status_matrix(), other.status_matrix());
}

fn small() -> impl Strategy<Value = f64> {
    (-1000i32..1000).prop_map(|i| i as f64 / 8.0)
}

prop_compose! {
    fn configs()(
        cmd in 0usize..6,
        func in prop::option::of(0usize..3),
        body in prop::option::of(0usize..3),
        apex in prop::option::of(prop::collection::vec(small(), 2..4)),
        r in prop::option::of(small()),
        eps in prop::option::of(0.01f64..1.0),
        grid in 1usize..50,
        tol in 0.0f64..1e-3,
        seed in any::<u64>(),
        cloud in prop::option::of(prop::collection::vec(prop::collection::vec(small(), 2), 1..5)),
    ) -> ExperimentConfig {
        let commands = ["derivative", "rolle", "lagrange", "dual", "bp-search", "suite"];
        let mut c = ExperimentConfig::parse(&format!(r#"{{"command": "{}"}}"#, commands[cmd])).unwrap();
        c.function = func.map(|i| match i {
            0 => FunctionSpec::Catalog("bowl".into()),
            1 => FunctionSpec::Custom(multidir::ScalarFunction::affine(
                multidir::Vector::from_vec(vec![1.0, -2.0]), 0.5)),
            _ => FunctionSpec::Custom(multidir::ScalarFunction::bowl(2).restricted(
                multidir::Vector::zeros(2), 3.0)),
        });
        c.body = body.map(|i| match i {
            0 => BodySpec::Standard("ball".into()),
            1 => BodySpec::Custom(multidir::ConvexBody::polytope_from(&[&[1.0, 2.0], &[3.0, 0.5]]).unwrap()),
            _ => BodySpec::Custom(multidir::ConvexBody::ball(multidir::Vector::from_vec(vec![2.0, 0.0]), 0.5)
                .unwrap().enlarge(0.25).unwrap()),
        });
        c.apex = apex;
        c.r = r;
        c.eps = eps;
        c.grid = grid;
        c.tol = tol;
        c.seed = seed;
        c.cloud = cloud;
        c
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn config_round_trips(c in configs()) {
        let text = c.to_json();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_json(), text);
    }
}
