use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use rsw_core::io::{read_radial_csv, read_record_jsonl, read_series_csv, read_trajectory_csv};
use serde_json::Value;

fn rsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).to_string_lossy().into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn equilibrium_is_classified() {
    let o = rsw(&["separated", "--xi0", "0", "--eta0", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "Equilibrium kappa0=1");
}

#[test]
fn blowup_is_classified_and_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rsw(&["separated", "--xi0", "0", "--eta0", "2", "--out", out]);
    assert!(o.status.success());
    let line = stdout(&o);
    let t0: f64 = line.trim().strip_prefix("Blowup kappa0=-3 t0=").unwrap().parse().unwrap();
    assert!(t0.is_finite() && t0 > 0.0);
    let table = read_trajectory_csv(BufReader::new(File::open(dir.path().join("trajectory.csv")).unwrap())).unwrap();
    assert_eq!(table.regime, "Blowup");
    let phase = read_series_csv(
        BufReader::new(File::open(dir.path().join("phase.csv")).unwrap()),
        "rsw-phase-portrait",
        &["t", "xi", "eta", "theta"],
    )
    .unwrap();
    assert_eq!(phase.len(), 401);
    assert!((json(&dir.path().join("blowup.json"))["t0"].as_f64().unwrap() - t0).abs() < 1e-12);
}

#[test]
fn kappa_sweep_closes_every_period() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsw(&["separated", "--sweep", "kappa0=0.1:0.9:9", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    for l in &lines {
        assert!(l.starts_with("Periodic kappa0="), "{l}");
        let c: f64 = l.rsplit_once("closure=").unwrap().1.parse().unwrap();
        assert!(c < 1e-6);
    }
    let rows = read_series_csv(
        BufReader::new(File::open(dir.path().join("sweep.csv")).unwrap()),
        "rsw-kappa-sweep",
        &["kappa0", "xi0", "eta0", "closure", "t0"],
    )
    .unwrap();
    assert_eq!(rows.len(), 9);
    assert!(dir.path().join("run_008/trajectory.csv").exists());
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(rsw(&["separated", "--xi0", "abc"]).status.code(), Some(2));
    assert_eq!(rsw(&["separated", "--sweep", "kappa0=0:1"]).status.code(), Some(2));
    assert_eq!(rsw(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(rsw(&["run", "/no/such/config.json", "--out", "/tmp/unused"]).status.code(), Some(2));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"kind": "radial", "h_bar": -1, "initial": {"profile": "rest"}, "horizon": 1}"#).unwrap();
    let o = rsw(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("h_bar"));
}

#[test]
fn rest_run_reaches_horizon_with_zero_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsw(&["run", &config("rest.json"), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["termination"]["cause"], "horizon");
    assert_eq!(summary["forecast"]["relative"].as_f64().unwrap(), 0.0);
    assert_eq!(summary["criterion"]["holds"], false);
    let record = read_record_jsonl(BufReader::new(File::open(dir.path().join("record.jsonl")).unwrap())).unwrap();
    assert_eq!(record.termination.name(), "horizon");
    let cfg: rsw_core::model::ScenarioConfig = serde_json::from_value(json(&dir.path().join("config.json"))).unwrap();
    assert_eq!(cfg, record.config);
    let mut snaps: Vec<_> = fs::read_dir(dir.path().join("snapshots")).unwrap().map(|e| e.unwrap().path()).collect();
    snaps.sort();
    assert!(snaps.len() > 2);
    for p in &snaps {
        let s = read_radial_csv::<f64, _>(BufReader::new(File::open(p).unwrap())).unwrap();
        assert!(s.h.iter().all(|&h| h == 1.0));
    }
}

#[test]
fn bump_run_detects_blowup_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsw(&["run", &config("inward_bump_blowup.json"), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["termination"]["cause"], "blowup_detected");
    assert!(summary["termination"]["t"].as_f64().unwrap() < 0.1);
    assert!(summary["termination"]["location"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["weighted_momentum"]["applicable"], true);
}

#[test]
fn planar_swirl_residuals_meet_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsw(&["run", &config("planar_swirl.json"), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["termination"]["cause"], "horizon");
    assert!(summary["forecast"]["relative"].as_f64().unwrap() <= 1e-2);
}

#[test]
fn f32_run_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsw(&["run", &config("rest.json"), "--out", dir.path().to_str().unwrap(), "--scalar", "f32", "--horizon", "0.1"]);
    assert!(o.status.success());
    let record = read_record_jsonl(BufReader::new(File::open(dir.path().join("record.jsonl")).unwrap())).unwrap();
    assert_eq!(record.config.horizon, 0.1);
    assert_eq!(record.scheme.scalar, "f32");
}

#[test]
fn separated_config_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsw(&["run", &config("separated_blowup.json"), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["regime"]["tag"], "Blowup");
    assert!(dir.path().join("trajectory.csv").exists());
}

#[test]
fn verify_suites_pass_and_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let o = rsw(&["verify", "--suite", "separated", "--json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let report = json(&path);
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["suites"][0]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"kappa_drift") && names.contains(&"period_closure"));
    let all = rsw(&["verify"]);
    assert_eq!(all.status.code(), Some(0), "{}", String::from_utf8_lossy(&all.stderr));
}
