mod common;

use common::{run, run_ok, schema, validate, write};
use serde_json::{json, Value};

const LATTICE8: &str = "{\"period\": 8, \"points\": [0, 1, 2, 3, 4, 5, 6, 7]}";
const SKEWED4: &str = "{\"period\": 4, \"points\": [0, 1.1, 1.9, 3.2]}";

fn error_of(out: &std::process::Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error record is JSON");
    v["error"].clone()
}

#[test]
fn lattice_energy_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "lattice8.json", LATTICE8);
    let r = run_ok(&["energy", "--config", cfg.to_str().unwrap()]);
    let w = r["w"].as_f64().unwrap();
    assert!((w + 5.773_861_090_032_76).abs() < 1e-10, "w = {w}");
    assert_eq!(r["ratio"], Value::Null);
    assert_eq!(r["run_spec"]["subcommand"], "energy");
}

#[test]
fn csv_config_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "lattice.csv", "0\n1\n2\n3\n");
    let r = run_ok(&["counts", "--config", cfg.to_str().unwrap(), "--T", "0.25"]);
    assert_eq!(r["mean"].as_f64().unwrap(), 0.5);
    assert!((r["variance"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn qlb_sweep_is_byte_reproducible() {
    let args = ["qlb-sweep", "--N", "16", "--count", "100", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let single = common::bin()
        .args(args)
        .env("LOGGAS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let args = ["qlb-sweep", "--N", "8", "--count", "10"];
    let stdout = run(&args).stdout;
    let mut with_file: Vec<&str> = args.to_vec();
    with_file.extend(["--report", report.to_str().unwrap()]);
    let out = run(&with_file);
    assert!(out.status.success() && out.stdout.is_empty());
    let from_file = std::fs::read(&report).unwrap();
    let a: Value = serde_json::from_slice(&stdout).unwrap();
    let mut b: Value = serde_json::from_slice(&from_file).unwrap();
    assert_eq!(b["run_spec"]["args"]["report"], json!(report.to_str().unwrap()));
    b["run_spec"]["args"]["report"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["correlate", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "FileNotFound");
    assert!(out.stdout.is_empty());
}

#[test]
fn library_errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "dup.json", "{\"period\": 3, \"points\": [0, 1, 1]}");
    let out = run(&["energy", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_of(&out)["kind"], "DuplicatePoint");

    let bad = write(dir.path(), "bad.json", "{\"period\": 3}");
    let out = run(&["energy", "--config", bad.to_str().unwrap()]);
    assert_eq!(error_of(&out)["kind"], "ParseError");

    let out = run(&["sample", "--N", "3", "--beta", "1", "--steps", "10", "--burn-in", "10", "--out", "x.csv"]);
    assert_eq!(error_of(&out)["kind"], "BadSchedule");
}

#[test]
fn usage_errors_are_json() {
    let out = run(&["energy"]);
    assert_eq!(out.status.code(), Some(64));
    assert_eq!(error_of(&out)["kind"], "UsageError");
    let out = common::bin()
        .args(["qlb-sweep", "--N", "4"])
        .env("LOGGAS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn reports_validate_against_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let skewed = write(dir.path(), "c4.json", SKEWED4);
    let lattice = write(dir.path(), "l8.json", LATTICE8);
    let c = skewed.to_str().unwrap();
    let l = lattice.to_str().unwrap();
    let minimized = dir.path().join("m.json");
    let samples = dir.path().join("s.csv");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("energy", vec!["--config", c, "--via-definition"]),
        ("energy", vec!["--config", l]),
        ("defect", vec!["--config", c, "--normalization", "prefactored"]),
        ("defect", vec!["--config", l]),
        ("qlb-sweep", vec!["--N", "4,8", "--count", "5"]),
        ("minimize", vec!["--config", c, "--out", minimized.to_str().unwrap()]),
        ("minimize", vec!["--N", "5"]),
        ("field-check", vec!["--config", c]),
        ("correlate", vec!["--config", c]),
        ("correlate", vec!["--config", c, "--mc", "--samples", "500"]),
        ("counts", vec!["--config", c, "--T", "2.5"]),
        ("theorem1-sweep", vec!["--N", "8", "--eps-count", "2"]),
        ("fekete", vec!["--N", "6"]),
        (
            "sample",
            vec!["--N", "4", "--beta", "2", "--steps", "200", "--burn-in", "50", "--thinning", "5", "--out", samples.to_str().unwrap()],
        ),
        ("sweep-beta", vec!["--betas", "1,8", "--seeds", "1,2", "--steps", "200", "--burn-in", "50"]),
    ];
    for (sub, rest) in cases {
        let mut args = vec![sub];
        args.extend(rest);
        let report = run_ok(&args);
        if let Err(e) = validate(&schema(sub), &report, "") {
            panic!("{args:?}: {e}");
        }
    }
    let written = std::fs::read_to_string(&minimized).unwrap();
    let cfg = loggas::io::parse_config_json(&written).unwrap();
    assert!(cfg.is_lattice_translate(1e-6));
    let rows = loggas::io::parse_samples_csv(&std::fs::read_to_string(&samples).unwrap()).unwrap();
    assert_eq!(rows.len(), 30);
    assert_eq!(rows[0].0, 50);
}

#[test]
fn validator_rejects_drift() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "l8.json", LATTICE8);
    let s = schema("counts");
    let mut r = run_ok(&["counts", "--config", cfg.to_str().unwrap(), "--T", "1"]);
    r["extra"] = json!(1);
    assert!(validate(&s, &r, "").is_err());
}

#[test]
fn grid_test_function_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "l8.json", LATTICE8);
    let mut values = vec![vec![0.0; 9]; 9];
    values[4][4] = 1.0;
    let grid = json!({"x_min": -2.0, "x_max": 2.0, "y_min": -2.0, "y_max": 2.0, "values": values});
    let g = write(dir.path(), "phi.json", &grid.to_string());
    let phi = format!("grid:{}", g.display());
    let r = run_ok(&["correlate", "--config", cfg.to_str().unwrap(), "--phi", &phi]);
    assert!(r["correlation_gap"].as_f64().unwrap() < 1e-9);
}
