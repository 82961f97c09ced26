use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csmetric"))
        .args(args)
        .env_remove("CSMETRIC_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_poly_json_envelope() {
    let out = run(&[
        "solve-poly",
        "--m",
        "3",
        "--x0",
        "0.5",
        "--tol",
        "1e-12",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.ends_with(b"\n"));
    let v = json(&out);
    assert_eq!(v["schema"], "csmetric/1");
    assert_eq!(v["command"], "solve-poly");
    assert_eq!(v["passed"], true);
    let root = v["root"].as_f64().unwrap();
    assert!((root - 0.012_345_679_299_142_365).abs() < 1e-15);
    let keys: Vec<&String> = v.as_object().unwrap().keys().take(3).collect();
    assert_eq!(keys, ["schema", "command", "passed"]);
}

#[test]
fn domain_errors_exit_2_and_name_the_field() {
    let out = run(&["solve-poly", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m >= 3"));

    let out = run(&[
        "verify-space",
        "--space",
        r#"{"metric": "abs_sum", "domian": {}}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domian"));

    let out = run(&["verify-space", "--builtin", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["solve-poly"]).status.code(), Some(2));
    assert_eq!(run(&["verify-space"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify-thm41", "--m", "3", "--output", "yaml"])
            .status
            .code(),
        Some(2)
    );
    let out = Command::new(env!("CARGO_BIN_EXE_csmetric"))
        .args(["verify-thm41", "--m", "3"])
        .env("CSMETRIC_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_verdict_exits_1_with_witness() {
    let out = run(&[
        "verify-space",
        "--builtin",
        "squared_diff",
        "--alpha",
        "identity",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    let triangle = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == "composed_triangle")
        .unwrap();
    assert_eq!(triangle["passed"], false);
    assert_eq!(triangle["witness"].as_array().unwrap().len(), 4);
}

#[test]
fn passing_space_exits_0() {
    let out = run(&[
        "verify-space",
        "--builtin",
        "discrete_nat",
        "--params",
        "10",
        "--samples",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS composed_triangle"), "{text}");
}

#[test]
fn non_convergence_exits_1() {
    let out = run(&[
        "iterate",
        "--builtin",
        "app_metric",
        "--map",
        "scale",
        "--map-params",
        "0.5",
        "--x0",
        "1",
        "--max-iter",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "iterate",
        "--builtin",
        "app_metric",
        "--map",
        "scale",
        "--map-params",
        "0.5",
        "--x0",
        "1",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn contraction_check() {
    let args = [
        "check-contraction",
        "--builtin",
        "app_metric",
        "--map",
        "poly",
        "--map-params",
        "3",
        "--samples",
        "2000",
    ];
    let ok = run(&[&args[..], &["--r", "0.0123456790123"]].concat());
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&[&args[..], &["--r", "1e-6", "--output", "json"]].concat());
    assert_eq!(bad.status.code(), Some(1));
    assert!(json(&bad)["banach"]["witness"].is_array());
}

#[test]
fn seed_env_overrides_flag() {
    let with_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_csmetric"))
            .args([
                "verify-space",
                "--builtin",
                "abs_sum",
                "--samples",
                "50",
                "--seed",
                "1",
                "--output",
                "json",
            ])
            .env("CSMETRIC_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(json(&with_env("7"))["seed"], 7);
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("csmetric-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let args = [
        "verify-thm41",
        "--m",
        "4",
        "--samples",
        "500",
        "--output",
        "json",
    ];
    let direct = run(&args);
    let to_file = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_dir_all(dir).unwrap();
}
