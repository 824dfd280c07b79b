use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use okg_core::lattice::format::{self, LatticeData};

fn okg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okg"))
        .args(args)
        .current_dir(dir)
        .env("OKG_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_SOLVE: &[&str] = &["solve", "--n", "128", "--L", "8pi", "--center", "0.5", "--width", "0.05", "--nt", "16"];

#[test]
fn exponents_spot_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = okg(&["exponents", "--d", "2", "--theta", "1", "--p", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("δ=0.25 γ=4 σ=0.5"), "{}", stdout(&o));
}

#[test]
fn missing_output_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = okg(&["solve", "--report", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--out"));
    let o = okg(&["exponents", "--d", "0", "--p", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_rules() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.cfg"), "").unwrap();
    let o = okg(&["exponents", "--config", "empty.cfg", "--d", "2", "--p", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    fs::write(dir.path().join("bad.cfg"), "d = 2\nthis line is wrong\n").unwrap();
    let o = okg(&["exponents", "--config", "bad.cfg", "--p", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    fs::write(dir.path().join("unknown.cfg"), "d = 2\nwarp = 9\n").unwrap();
    let o = okg(&["exponents", "--config", "unknown.cfg", "--p", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("warp"));

    fs::write(dir.path().join("run.cfg"), "lambda = 2\nT = 0.5\n").unwrap();
    let mut args = SMALL_SOLVE.to_vec();
    args.extend(["--config", "run.cfg", "--lambda", "1", "--out", "u.okg", "--report", "r.json"]);
    let o = okg(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["lambda"], 1.0);
    assert_eq!(report["config"]["horizon"], 0.5);
    assert_eq!(report["format_version"], 1);
}

#[test]
fn solve_writes_series_and_deterministic_report() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut args = SMALL_SOLVE.to_vec();
    args.extend(["--lambda", "2", "--T", "1", "--out", "u.okg", "--report", "r.json"]);
    for dir in [&a, &b] {
        let o = okg(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = fs::read_to_string(a.path().join("r.json")).unwrap();
    assert!(text == fs::read_to_string(b.path().join("r.json")).unwrap());
    assert_eq!(fs::read(a.path().join("u.okg")).unwrap(), fs::read(b.path().join("u.okg")).unwrap());
    match format::read(&a.path().join("u.okg")).unwrap() {
        LatticeData::Series(s) => {
            assert_eq!(s.len(), 17);
            assert_eq!(s.grid().length(), 4.0 * std::f64::consts::PI);
        }
        other => panic!("expected a series, got {other:?}"),
    }
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["result"]["iterations"]["converged"], true);
}

#[test]
fn gen_data_then_norm() {
    let dir = tempfile::tempdir().unwrap();
    let o = okg(&["gen-data", "--data", "sp-series", "--n", "64", "--L", "2pi", "--k", "0", "--out", "sp.okg"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = okg(&["norm", "--input", "sp.okg", "--spec", "0,-1,2,2", "--kind", "e", "--out", "n.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("n.csv")).unwrap();
    assert!(csv.starts_with("input,kind,sigma,s,p,q,set,value\n"));
    let o = okg(&["norm", "--input", "sp.okg", "--spec", "0,-1,2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decay_scan_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = okg(
        &["decay-scan", "--d", "1", "--lambda", "1", "--j", "1", "--times", "4", "--out", "d.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,lambda,j,regime,t,sup_norm");
    assert_eq!(lines.len(), 5);
}

#[test]
fn verify_exit_codes_and_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = okg(&["verify", "--suite", "partition", "--report", "v.json", "--constants", "c.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["pass"], true);
    assert_eq!(report["config"]["suite"][0], "partition");
    assert!(fs::read_to_string(dir.path().join("c.csv")).unwrap().contains("partition"));
    let o = okg(&["verify", "--suite", "L9.9", "--report", "v.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
