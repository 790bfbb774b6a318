use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn strlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn passing_experiment_exits_zero_and_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "ok.json", r#"{"experiment": "wave_packet"}"#);
    let out = tmp.path().join("run");
    let o = strlab(&["experiment", "wave_packet", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("wave_packet: PASS"));
    let report = read_report(&out);
    assert_eq!(report["experiment"], "wave_packet");
    assert!(out.join("wave_packet_centroid.csv").exists());
}

#[test]
fn half_wave_packets_co_travel() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "hw.json",
        r#"{"dispersion": {"kind": "half_wave"}, "params": {"xi0": 4}}"#,
    );
    let out = tmp.path().join("run");
    let o = strlab(&["experiment", "wave_packet", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = read_report(&out);
    assert!(report["verdicts"]["co_travel_overlap"]["pass"].as_bool().unwrap());
    assert!(report["metrics"]["overlap"].as_f64().unwrap() >= 0.9);
}

#[test]
fn missing_config_exits_two_naming_the_path() {
    let o = strlab(&["experiment", "wave_packet", "--config", "/no/such/config.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/config.json"));
}

#[test]
fn impossible_tolerance_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "tight.json", r#"{"tolerances": {"resonant_slope": 0}}"#);
    let out = tmp.path().join("run");
    let o = strlab(&["experiment", "resonant_growth", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL (resonant_slope)"));
    let report = read_report(&out);
    assert_eq!(report["verdicts"]["resonant_slope"]["tolerance"], 0.0);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(strlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(strlab(&["experiment", "no_such_experiment"]).status.code(), Some(2));
    for (name, json) in [
        ("bad.json", "{ not json"),
        ("unknown_field.json", r#"{"grid": {"size": 3}}"#),
        ("unknown_tolerance.json", r#"{"tolerances": {"nope": 1}}"#),
        ("wrong_name.json", r#"{"experiment": "resonant_growth"}"#),
    ] {
        let cfg = write_config(tmp.path(), name, json);
        let o = strlab(&["experiment", "wave_packet", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn seeded_runs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str, seed: &str| {
        let out = tmp.path().join(dir);
        let o = strlab(&["experiment", "normal_form_check", "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        read_report(&out)
    };
    let (a, b, c) = (run("a", "7"), run("b", "7"), run("c", "8"));
    assert_eq!(a["metrics"], b["metrics"]);
    assert_ne!(a["metrics"], c["metrics"]);
    assert_eq!(a["provenance"]["config"]["seed"], 7);
}

#[test]
fn tool_subcommands_write_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.json", r#"{"solver": {"t_final": 0.1, "dt": 0.01}, "params": {"stride": 5}}"#);
    let cases: [(&str, &[&str]); 3] = [
        ("resonances", &["resonant_sets.csv"]),
        ("classify", &["classify.csv"]),
        ("simulate", &["trajectory.csv", "trajectory_summary.csv"]),
    ];
    for (cmd, files) in cases {
        let out = tmp.path().join(cmd);
        let mut args = vec![cmd, "--out", out.to_str().unwrap()];
        if cmd == "simulate" {
            args.extend(["--config", &cfg]);
        }
        let o = strlab(&args);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stdout));
        for f in files {
            assert!(out.join(f).exists(), "{cmd} did not write {f}");
        }
    }
}
