use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anomaly-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn all_suite_passes_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let first = lab(&["all", "--seed", "7", "--out", path(&a)]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let second = lab(&["all", "--seed", "7", "--out", path(&b)]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let report = anomaly_core::report::load(&a).unwrap();
    assert_eq!(report.suite, "all");
    assert!(report.passed());
    let names: Vec<_> = report.records.iter().map(|r| r.name.clone()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn unitarity_report_contains_the_level_zero_witness() {
    let out = lab(&["unitarity"]);
    assert_eq!(out.status.code(), Some(0));
    let report = anomaly_core::CheckReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let row = report
        .unitarity_scan
        .iter()
        .find(|r| r.k == 0.0 && r.weight == 0.5)
        .expect("k=0, j=1/2 row");
    assert_eq!(row.verdict, anomaly_core::Verdict::NegativeNorm { grade: 1 });
}

#[test]
fn failing_check_sets_exit_code() {
    // three nodes on the circle cannot resolve windings up to 2
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"samples": 3, "max_winding": 2}"#).unwrap();
    let out = lab(&["cocycles", "--config", path(&cfg), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("suite,name,status,measured,tolerance,bound\n"));
    assert!(csv.contains(",fail,"));
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.json");
    std::fs::write(&cfg, r#"{"sampels": 64}"#).unwrap();
    let out = lab(&["algebra", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampels"));
}

#[test]
fn grade_cap_and_unwritable_output_are_errors() {
    let out = lab(&["unitarity", "--max-grade", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lab(&["algebra", "--out", "/nonexistent/dir/r.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_csv_schema() {
    let out = lab(&["scan", "--levels", "0,1", "--spins", "0.5", "--max-grade", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,weight,grade_reached,verdict,min_eigenvalue"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("0,0.5,1,negative-norm,"));
    assert!(rows[1].starts_with("1,0.5,2,psd,"));

    let relaxed = lab(&["scan", "--spins", "0.5", "--relax-lowest-weight"]);
    assert!(String::from_utf8(relaxed.stdout).unwrap().contains("lowest-weight-relaxed"));
}

#[test]
fn jet_run_writes_time_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("series.csv");
    std::fs::write(
        &cfg,
        r#"{"omega": 1.0, "kvec": [0, 0, 0], "p": 2, "dt": 0.01, "steps": 100, "every": 100}"#,
    )
    .unwrap();
    let res = lab(&["jet-run", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!((last[1] - 1f64.cos()).abs() < 1e-8 && (last[2] - 1f64.sin()).abs() < 1e-8);
}
