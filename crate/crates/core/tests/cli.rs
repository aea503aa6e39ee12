//! The `mapless` binary: output bytes, files and exit statuses.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mapless_planner::cli::{build_planner, evaluate_text};
use mapless_planner::io::{config_hash, trace_from_csv, RunConfig};
use mapless_planner::simulator::builtin_scenario;
use mapless_planner::types::{Maneuver, Source, Trajectory, Waypoint};

fn mapless(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapless")).current_dir(dir).args(args).output().expect("binary runs")
}

fn straight(v: f64) -> Trajectory {
    let samples = (0..=30).map(|k| {
        let t = 0.1 * k as f64;
        Waypoint { t, x: v * t, y: 0.0, heading: 0.0, v }
    });
    Trajectory::from_samples(samples.collect(), Maneuver::LaneKeep, Source::Human)
}

#[test]
fn evaluate_prints_the_library_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let traj = straight(8.0);
    fs::write(dir.path().join("t.json"), serde_json::to_string(&traj).unwrap()).unwrap();
    let out = mapless(dir.path(), &["evaluate", "--scenario", "lead_brake", "--trajectory", "t.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let mut cfg = RunConfig::default();
    cfg.resolve(Path::new("."));
    let planner = build_planner(&cfg).unwrap();
    let expected = evaluate_text(&planner, &builtin_scenario("lead_brake").unwrap(), &traj).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
    assert!(expected.starts_with("total "));
    assert_eq!(expected.lines().filter(|l| l.contains(',')).count(), 31);

    let saved = fs::read_to_string(dir.path().join("out/lead_brake.cost.txt")).unwrap();
    assert!(saved.starts_with(&format!("# config={}", config_hash(&cfg))));
}

#[test]
fn unknown_flag_prints_usage_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapless(dir.path(), &["simulate", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(mapless(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failure_classes_have_distinct_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("bad.toml"), "grid = 3\n").unwrap();
    fs::write(p.join("clock.toml"), "[time]\nhorizon_steps = 20\n").unwrap();
    let missing = mapless(p, &["--config", "nope.toml", "sample", "--scenario", "cut_in"]);
    let malformed = mapless(p, &["--config", "bad.toml", "sample", "--scenario", "cut_in"]);
    let invalid = mapless(p, &["--config", "clock.toml", "sample", "--scenario", "cut_in"]);
    let no_scene = mapless(p, &["sample", "--scenario", "atlantis"]);
    assert_eq!(missing.status.code(), Some(4));
    assert_eq!(malformed.status.code(), Some(3));
    assert_eq!(invalid.status.code(), Some(5));
    assert_eq!(no_scene.status.code(), Some(4));
    for out in [&missing, &malformed, &invalid, &no_scene] {
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn simulate_writes_stamped_reproducible_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let args = ["simulate", "--scenario", "empty_road", "--output", "a"];
    assert_eq!(mapless(p, &args).status.code(), Some(0));
    let args = ["simulate", "--scenario", "empty_road", "--output", "b"];
    assert_eq!(mapless(p, &args).status.code(), Some(0));
    for file in ["empty_road.trace.csv", "empty_road.decisions.jsonl", "empty_road.metrics.json"] {
        let a = fs::read(p.join("a").join(file)).unwrap();
        let b = fs::read(p.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
    let trace = trace_from_csv(&fs::read_to_string(p.join("a/empty_road.trace.csv")).unwrap()).unwrap();
    assert_eq!(trace.scenario, "empty_road");
    assert!(!trace.rows.is_empty());
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(p.join("a/empty_road.metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["config_hash"], serde_json::Value::String(trace.config_hash.clone()));
    assert_eq!(metrics["collisions"], 0);
}

#[test]
fn seed_flag_changes_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(mapless(p, &["export-raster", "--scenario", "cut_in", "--output", "a"]).status.code(), Some(0));
    assert_eq!(mapless(p, &["--seed", "9", "export-raster", "--scenario", "cut_in", "--output", "b"]).status.code(), Some(0));
    let header = |d: &str| {
        let bytes = fs::read(p.join(d).join("cut_in_1_agents.pgm")).unwrap();
        String::from_utf8_lossy(&bytes[..64]).lines().nth(1).unwrap().to_string()
    };
    assert_ne!(header("a"), header("b"));
}
