use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mapme::experiment::output::read_manifest;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim")).args(args).output().expect("sim runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn stretch_eval_writes_a_hashed_run_directory() {
    let out = tempfile::tempdir().unwrap();
    let cfg = data("configs/stretch_eval.json");
    let o = sim(&[
        "stretch-eval",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "mobility.movements=5",
        "--out",
        out.path().to_str().unwrap(),
        "--seed",
        "3",
        "--runs",
        "4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = read_manifest(out.path()).unwrap();
    assert!(manifest.contains_key("config.json"));
    assert!(manifest.contains_key("seeds.txt"));
    let seeds = std::fs::read_to_string(out.path().join("seeds.txt")).unwrap();
    assert_eq!(seeds, "3\n4\n5\n6\n");
    let echoed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(echoed["runs"], 4);
    assert_eq!(echoed["mobility"]["movements"], 5);
    assert!(manifest.keys().any(|k| k.ends_with(".csv")));
}

#[test]
fn grid_sim_runs_without_a_config_file() {
    let out = tempfile::tempdir().unwrap();
    let o = sim(&[
        "grid-sim",
        "--set",
        "traffic.duration_s=3",
        "--set",
        "traffic.warmup_s=0",
        "--set",
        "mobility.speeds_mps=[10]",
        "--set",
        "t_u_sweep_s=[]",
        "--set",
        "protocols=[\"mapme\",\"ab\"]",
        "--out",
        out.path().to_str().unwrap(),
        "--runs",
        "1",
        "--seed",
        "9",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(read_manifest(out.path()).unwrap().len() > 2);
}

#[test]
fn scenario_mismatch_is_rejected() {
    let out = tempfile::tempdir().unwrap();
    let cfg = data("configs/grid_sim.json");
    let o = sim(&["trace-sim", "--config", cfg.to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("config is for grid-sim"), "{}", stderr(&o));
}

#[test]
fn unknown_override_key_fails() {
    let out = tempfile::tempdir().unwrap();
    let o = sim(&["grid-sim", "--set", "traffic.nope=1", "--out", out.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown config key"), "{}", stderr(&o));
}

#[test]
fn invalid_values_fail_validation() {
    let out = tempfile::tempdir().unwrap();
    let o = sim(&["grid-sim", "--set", "topology.wireless_loss=2", "--out", out.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("wireless_loss"), "{}", stderr(&o));
    let o = sim(&["grid-sim", "--runs", "0", "--out", out.path().to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn malformed_config_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"runs\": ").unwrap();
    let o = sim(&["grid-sim", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    let o = sim(&["grid-sim", "--config", "/no/such/file.json", "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let o = sim(&[]);
    assert_eq!(o.status.code(), Some(2));
}
