use std::fs;
use std::path::Path;
use std::process::Command;

use majcert_cli::config::ExperimentConfig;
use majcert_cli::report::Report;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_majcert"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run_config(dir: &Path, config: &str, out: &str) -> (i32, std::path::PathBuf) {
    let cfg = write(dir, &format!("{out}.config.json"), config);
    let out = dir.join(out);
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--jobs", "2"])
        .status()
        .unwrap();
    (status.code().unwrap(), out)
}

const POINTS: &str = r#"{"schema": 1, "suite": "majcert", "seed": 1,
  "parameters": {"class": {"kind": "point-functions", "n": 6, "count": 64}, "instances": 3}}"#;

#[test]
fn point_functions_all_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_config(dir.path(), POINTS, "points.json");
    assert_eq!(code, 0);
    let report: Report = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report.summary.verified, 3);
    for r in &report.records {
        assert!(r.decomposition.is_some());
        assert_eq!(r.measurements["class_size"], Value::from(65u64));
    }
}

#[test]
fn l2_counterexample_suite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"schema": 1, "suite": "l2counter", "seed": 2, "parameters": {"n": 2, "instances": 4}}"#;
    let (code, out) = run_config(dir.path(), cfg, "l2.json");
    assert_eq!(code, 0);
    let report: Report = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    for r in &report.records {
        assert_eq!(r.measurements["delta_inf"], Value::from(1.0));
        assert!(r.measurements["delta2_on_x"].as_f64().unwrap() <= 1.0 / 2f64.sqrt() + 1e-12);
    }
}

#[test]
fn invalid_suite_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"schema": 1, "suite": "bogus", "parameters": {}}"#;
    let (code, out) = run_config(dir.path(), cfg, "bogus.json");
    assert_eq!(code, 2);
    assert!(!out.exists());

    let cfg = r#"{"schema": 9, "suite": "l2counter", "parameters": {"n": 2}}"#;
    let (code, out) = run_config(dir.path(), cfg, "schema.json");
    assert_eq!(code, 2);
    assert!(!out.exists());
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = run_config(dir.path(), POINTS, "a.json");
    let (_, b) = run_config(dir.path(), POINTS, "b.json");
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn jobs_do_not_change_the_report() {
    let (config, params) = ExperimentConfig::parse(POINTS).unwrap();
    let one = majcert_cli::run(&config, &params, None, 1).unwrap().report;
    let four = majcert_cli::run(&config, &params, None, 4).unwrap().report;
    assert_eq!(one.to_json(), four.to_json());
    let other = majcert_cli::run(&config, &params, Some(12), 1).unwrap().report;
    assert_eq!(other.config.seed, 12);
    assert_ne!(one.records[0].seed, other.records[0].seed);
}

#[test]
fn verify_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let (_, out) = run_config(dir.path(), POINTS, "r.json");
    let ok = bin().args(["verify", "--report"]).arg(&out).status().unwrap();
    assert_eq!(ok.code(), Some(0));

    let mut report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    report["records"][1]["measurements"]["m"] = Value::from(999u64);
    let tampered = write(dir.path(), "t.json", &serde_json::to_string(&report).unwrap());
    let bad = bin().args(["verify", "--report"]).arg(&tampered).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("record 1 differs"));
}

#[test]
fn csv_has_one_row_per_instance() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let cfg = format!(
        r#"{{"schema": 1, "suite": "equivalence", "seed": 1, "csv_path": {:?},
  "parameters": {{"class": {{"kind": "random-boolean", "n": 3, "size": 8}}, "k": 2, "instances": 3}}}}"#,
        csv.to_str().unwrap()
    );
    let (code, _) = run_config(dir.path(), &cfg, "eq.json");
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert!(reader.headers().unwrap().iter().any(|h| h == "gap"));
    assert_eq!(reader.records().count(), 3);
}
