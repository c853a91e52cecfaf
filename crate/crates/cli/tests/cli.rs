use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eecn_core::metrics::{import, ExportFormat, TRACE_HEADER};
use serde_json::Value;
use tempfile::TempDir;

fn eecn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eecn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn desk() -> String {
    scenarios_dir()
        .join("dumbbell-desk.json")
        .display()
        .to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn validate_accepts_every_shipped_scenario() {
    let mut files: Vec<String> = std::fs::read_dir(scenarios_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.display().to_string())
        .collect();
    files.sort();
    assert_eq!(files.len(), 3);
    let args: Vec<&str> = std::iter::once("validate")
        .chain(files.iter().map(String::as_str))
        .collect();
    let o = eecn(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);
}

#[test]
fn validate_names_the_bad_field() {
    let dir = TempDir::new().unwrap();
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(desk()).unwrap()).unwrap();
    v["flows"][0]["algo"] = "vegas".into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = eecn(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("flows[0].algo"), "{}", stderr(&o));

    v["flows"][0]["algo"] = "eecn".into();
    v.as_object_mut().unwrap().remove("schema_version");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = eecn(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("schema_version"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_a_config_error() {
    let o = eecn(&["run", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("missing.json") && err.contains("No such file"),
        "{err}"
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(
        eecn(&["run", &desk(), "--format", "xml"]).status.code(),
        Some(1)
    );
    assert_eq!(
        eecn(&["compare", &desk(), "--algos", "eecn,vegas"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(eecn(&[]).status.code(), Some(1));
    assert_eq!(eecn(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_is_deterministic_and_honours_the_seed() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = eecn(&[
            "run",
            &desk(),
            "--seed",
            "7",
            "--duration",
            "10",
            "--report",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let report = import(&bytes, ExportFormat::Json).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(report.end_s, 10.0);
}

#[test]
fn run_writes_trace_series_and_csv_report() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("t.csv");
    let series = dir.path().join("s.csv");
    let report = dir.path().join("r.csv");
    let o = eecn(&[
        "run",
        &desk(),
        "--duration",
        "3",
        "--trace",
        trace.to_str().unwrap(),
        "--series",
        series.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(t.lines().next(), Some(TRACE_HEADER));
    assert!(t.lines().count() > 100);
    let s = std::fs::read_to_string(&series).unwrap();
    assert_eq!(s.lines().next(), Some("series,entity,time_s,value"));
    assert!(s.contains("cwnd_bytes,flow0,") && s.contains("occupancy_pkts,ra>rb,"));
    let r = import(&std::fs::read(&report).unwrap(), ExportFormat::Csv).unwrap();
    assert_eq!(r.flows.len(), 8);
}

#[test]
fn report_to_stdout() {
    let o = eecn(&["run", &desk(), "--duration", "1", "--report", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let r = import(&o.stdout, ExportFormat::Json).unwrap();
    assert_eq!(r.scenario, "dumbbell-desk");
}

#[test]
fn compare_has_one_row_per_algorithm() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cmp.json");
    let o = eecn(&[
        "compare",
        &desk(),
        "--duration",
        "20",
        "--report",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json_file(&out);
    let rows = v["rows"].as_array().unwrap();
    let algos: Vec<_> = rows.iter().map(|r| r["algo"].as_str().unwrap()).collect();
    assert_eq!(algos, ["eecn", "ecn", "newreno"]);
    let red = v["reductions_pct"].as_array().unwrap();
    assert_eq!(red.len(), 2);
    assert_eq!(red[0]["algo"], "eecn_vs_ecn");
    let (e, c) = (
        rows[0]["packets_sent"].as_f64().unwrap(),
        rows[1]["packets_sent"].as_f64().unwrap(),
    );
    let expected = (c - e) / c * 100.0;
    assert!((red[0]["packets_sent"].as_f64().unwrap() - expected).abs() < 1e-9);

    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("reduction"));
}

#[test]
fn single_algorithm_compare_has_no_reductions() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cmp.csv");
    let o = eecn(&[
        "compare",
        &desk(),
        "--algos",
        "ecn",
        "--duration",
        "5",
        "--report",
        out.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("algo,packets_sent,packets_dropped,drop_pct"));
    assert!(lines[1].starts_with("ecn,"));
}

#[test]
fn sweep_rows_follow_the_pairs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.json");
    let o = eecn(&[
        "sweep",
        &desk(),
        "--duration",
        "5",
        "--pair",
        "0.5:0.7",
        "--pair",
        "0.3:0.5",
        "--pair",
        "0.2:0.4",
        "--report",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json_file(&out);
    let th1: Vec<_> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["th1"].as_f64().unwrap())
        .collect();
    assert_eq!(th1, [0.5, 0.3, 0.2]);
    for key in [
        "ef_throughput_bps",
        "sf_throughput_bps",
        "packets_dropped",
        "ef_e2e_delay_s",
        "sf_e2e_delay_s",
    ] {
        assert!(v["rows"][0].get(key).is_some(), "{key}");
    }
}

#[test]
fn empty_sweep_is_an_empty_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.json");
    let o = eecn(&["sweep", &desk(), "--report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json_file(&out)["rows"], Value::Array(vec![]));
}

#[test]
fn inverted_thresholds_are_rejected() {
    let o = eecn(&["sweep", &desk(), "--pair", "0.5:0.3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("th1 must be below th2"));
}
