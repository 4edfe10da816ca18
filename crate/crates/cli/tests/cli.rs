use std::fs;
use std::process::{Command, Output};

use hopial_cli::config::RunConfig;
use hopial_cli::report::CSV_HEADER;
use serde_json::Value;

fn hopial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopial"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn constant_prints_value_and_factors() {
    let o = hopial(&[
        "constant",
        "--theorem",
        "T2.1",
        "--r",
        "const:1",
        "--s",
        "const:1",
        "--interval",
        "0,1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("0.333333333333"), "{out}");
    assert!(out.contains("factor"), "{out}");
}

#[test]
fn hardy_verify_holds() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = hopial(&[
        "verify",
        "--theorem",
        "HARDY",
        "--p",
        "2",
        "--f",
        "pow:-0.49",
        "--interval",
        "0,1",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["theorem"], "HARDY");
    assert_eq!(v["mode"], "as_printed");
    assert!(v["timestamp"].is_string());
    assert_eq!(v["constant"]["value"].as_f64().unwrap(), 4.0);
    let inst = &v["instances"][0];
    assert!((inst["ratio"].as_f64().unwrap() - 0.9611).abs() < 2e-3);
    assert_eq!(inst["status"], "Holds");
    for key in ["lhs", "rhs", "budget"] {
        assert!(inst[key].is_number(), "{key}");
    }
}

#[test]
fn malformed_theorem_id_is_a_usage_error() {
    let o = hopial(&["verify", "--theorem", "T9.9", "--f", "const:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--theorem"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"command":"verify","theorem":"T9.9","f":{"variant":"Constant","c":1}}"#,
    )
    .unwrap();
    let o = hopial(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("theorem"), "{}", stderr(&o));
}

#[test]
fn bad_function_syntax_names_the_flag() {
    let o = hopial(&["verify", "--theorem", "T2.1", "--f", "sin:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--f"), "{}", stderr(&o));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(hopial(&["--help"]).status.code(), Some(0));
    assert_eq!(hopial(&["--version"]).status.code(), Some(0));
    assert_eq!(hopial(&[]).status.code(), Some(1));
}

#[test]
fn violated_instance_exits_two_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = hopial(&[
        "verify",
        "--theorem",
        "T2.22",
        "--f",
        "const:0.1",
        "--mode",
        "as_printed",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["instances"][0]["status"], "Violated");
    assert_eq!(v["instances"][0]["witness"]["id"], "T2.22");
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let args = [
        "sweep",
        "--theorem",
        "T2.1",
        "--count",
        "25",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ];
    let o = hopial(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 25);
    let first = fs::read_to_string(&svg).unwrap();
    assert!(first.starts_with("<?xml") && first.contains("<polyline"));
    hopial(&args);
    assert_eq!(fs::read_to_string(&svg).unwrap(), first);
}

#[test]
fn printed_config_runs_identically() {
    let dir = tempfile::tempdir().unwrap();
    let o = hopial(&[
        "lemma",
        "--variant",
        "OPIAL",
        "--y",
        "pwl:0,0;0.5,0.5;1,0",
        "--print-config",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cfg = RunConfig::from_json(&stdout(&o)).unwrap();
    assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    let path = dir.path().join("c.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let o = hopial(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ratio = 1.0000000000"), "{}", stdout(&o));
}

#[test]
fn tolerance_out_of_range_is_rejected() {
    let o = hopial(&[
        "verify",
        "--theorem",
        "T2.1",
        "--s",
        "const:1",
        "--f",
        "const:1",
        "--tol",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tol"), "{}", stderr(&o));
}

#[test]
fn thread_override_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_hopial"))
        .args(["constant", "--theorem", "T2.1", "--s", "const:1"])
        .env("HOPIAL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_hopial"))
        .args(["sweep", "--theorem", "T2.1", "--count", "5"])
        .env("HOPIAL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn sharpness_reports_the_search() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("h.json");
    let o = hopial(&[
        "sharpness",
        "--theorem",
        "HARDY",
        "--p",
        "2",
        "--family",
        "power",
        "--range",
        "-0.5,-0.05",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["search"]["best_ratio"].as_f64().unwrap() >= 0.96);
    assert!(v["search"]["best_params"][0].as_f64().unwrap() < -0.49);
    assert!(v["search"]["evaluations"].as_u64().unwrap() <= 60);
}
