use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn darboux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(args)
        .env_remove("DARBOUX_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

const SOLITON: &str = r#"{
    "grid": {"x_min": -5, "x_max": 5, "count": 2001},
    "channels": 1,
    "potential": {"kind": "zero"},
    "transformations": [
        {"lambdas": [-1], "columns": [{"terms": [{"form": "cosh", "k": 1, "vector": [1]}]}]}
    ],
    "states": [{"energy": 1, "terms": [{"form": "expi", "k": 1, "vector": [1]}]}],
    "output": "from-config"
}"#;

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn potential_at_zero(csv_path: &Path) -> f64 {
    let body = std::fs::read_to_string(csv_path).unwrap();
    let row = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|r| r[0].abs() < 1e-9)
        .expect("grid has a node at 0");
    row[1]
}

#[test]
fn transform_writes_the_one_soliton() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "soliton.json", SOLITON);
    let out = dir.path().join("out");
    let res = darboux(&["transform", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "{}{}", text(&res.stdout), text(&res.stderr));
    assert!((potential_at_zero(&out.join("potential.csv")) + 2.0).abs() < 1e-8);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["chain_length"], 1);
    assert!(out.join("states.csv").exists());
}

#[test]
fn output_directory_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "soliton.json", SOLITON);

    assert_eq!(darboux(&["transform", &cfg]).status.code(), Some(0));
    assert!(dir.path().join("from-config/report.json").exists());

    let env_dir = dir.path().join("from-env");
    let res = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(["transform", &cfg])
        .env("DARBOUX_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(0));
    assert!(env_dir.join("report.json").exists());

    let flag_dir = dir.path().join("from-flag");
    let res = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(["transform", &cfg, "--output", flag_dir.to_str().unwrap()])
        .env("DARBOUX_OUTPUT_DIR", env_dir.join("unused"))
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(0));
    assert!(flag_dir.join("report.json").exists());
    assert!(!env_dir.join("unused").exists());
}

#[test]
fn duplicate_eigenvalue_lists_are_rejected() {
    let dir = TempDir::new().unwrap();
    let body = SOLITON.replace(
        r#"{"lambdas": [-1], "columns": [{"terms": [{"form": "cosh", "k": 1, "vector": [1]}]}]}"#,
        r#"{"lambdas": [-1], "columns": [{"terms": [{"form": "cosh", "k": 1, "vector": [1]}]}]},
           {"lambdas": [-1], "columns": [{"terms": [{"form": "sinh", "k": 1, "vector": [1]}]}]}"#,
    );
    let cfg = write(dir.path(), "dup.json", &body);
    let res = darboux(&["transform", &cfg, "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(text(&res.stderr).contains("pairwise distinct"), "{}", text(&res.stderr));
}

#[test]
fn malformed_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", &SOLITON.replace("\"count\": 2001", "\"count\": -3"));
    let res = darboux(&["transform", &cfg]);
    assert_eq!(res.status.code(), Some(1));
    assert!(text(&res.stderr).contains("grid.count"), "{}", text(&res.stderr));
}

#[test]
fn missing_config_file_is_an_error() {
    let res = darboux(&["transform", "/nonexistent/config.json"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn failing_check_exits_two() {
    let dir = TempDir::new().unwrap();
    // E = 2 is not the energy of exp(ix).
    let cfg = write(dir.path(), "wrong.json", &SOLITON.replace("\"energy\": 1", "\"energy\": 2"));
    let res = darboux(&["transform", &cfg, "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(text(&res.stdout).contains("FAIL schrodinger-state-0"));
}

#[test]
fn identity_verification_exit_codes() {
    assert_eq!(darboux(&["verify-identities", "--trials", "50"]).status.code(), Some(0));
    assert_eq!(darboux(&["verify-identities", "--trials", "0"]).status.code(), Some(1));
    let injected = darboux(&["verify-identities", "--trials", "50", "--inject-failure"]);
    assert_eq!(injected.status.code(), Some(2));
    assert!(text(&injected.stdout).contains("FAIL sylvester"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(darboux(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(darboux(&["demo", "no-such-demo"]).status.code(), Some(1));
    assert_eq!(darboux(&["--help"]).status.code(), Some(0));
    let list = darboux(&["demo", "--list"]);
    assert_eq!(list.status.code(), Some(0));
    assert!(text(&list.stdout).contains("coupled-triple"));
}

#[test]
fn tabulated_potential_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "soliton.json", SOLITON);
    assert_eq!(darboux(&["transform", &cfg]).status.code(), Some(0));

    // The emitted -2 sech²x becomes the input of a second step.
    let tab = write(
        dir.path(),
        "tab.json",
        r#"{
            "grid": {"x_min": -5, "x_max": 5, "count": 2001},
            "channels": 1,
            "potential": {"kind": "tabulated", "path": "from-config/potential.csv"},
            "transformations": [{"lambdas": [-2.25], "columns": [{"ode": {"value": [1], "deriv": [1.4]}}]}],
            "states": [{"energy": 1, "value": [1], "deriv": [0]}],
            "output": "second"
        }"#,
    );
    let res = darboux(&["transform", &tab]);
    assert_eq!(res.status.code(), Some(0), "{}{}", text(&res.stdout), text(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("second/report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["check"] == "intertwining" && c["pass"] == true));
}

#[test]
fn short_table_is_rejected() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("v.csv"), "x,re_v_0_0,im_v_0_0\n0,1,0\n").unwrap();
    let cfg = write(
        dir.path(),
        "tab.json",
        &SOLITON.replace(r#"{"kind": "zero"}"#, r#"{"kind": "tabulated", "path": "v.csv"}"#),
    );
    let res = darboux(&["transform", &cfg]);
    assert_eq!(res.status.code(), Some(1));
    assert!(text(&res.stderr).contains("potential"), "{}", text(&res.stderr));
}
