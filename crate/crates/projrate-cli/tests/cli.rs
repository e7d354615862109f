//! End-to-end tests of the `projrate` binary: output contracts, exit codes,
//! determinism, and config round-trips.

use std::process::{Command, Output};

use projrate_cli::RunConfig;

fn projrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projrate"))
        .args(args)
        .env_remove("PROJRATE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn rate_curve_hits_the_closed_form_row() {
    let out = projrate(&["rate", "--p", "2", "--r-grid", "0:0.9:0.1"]);
    let text = stdout(&out);
    assert!(text.starts_with("# config:"), "missing config header");
    let config = RunConfig::from_source_text(&text).unwrap();
    assert_eq!(config.subcommand, "rate");
    assert_eq!(config.p, Some(2.0));
    let mut lines = text.lines();
    lines.next();
    assert_eq!(
        lines.next().unwrap(),
        "p,r,s,value,v_star,c_star,status",
        "csv header row"
    );
    let row = text
        .lines()
        .find(|l| l.contains(",5.0000000000000000e-1,"))
        .expect("r = 0.5 row");
    let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    let want = -0.5 * (1.0f64 - 0.25).ln();
    assert!((value - want).abs() < 1e-5, "value {value} vs {want}");
}

#[test]
fn weingarten_moment_matches_the_exact_formula() {
    let out = projrate(&["weingarten", "--moment", "a11^4", "--n", "50"]);
    let text = stdout(&out);
    let row = text.lines().nth(2).expect("data row");
    let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    let want = 3.0 / (50.0 * 52.0);
    assert!(
        (value - want).abs() < 1e-15,
        "a11^4 at n=50: {value} vs {want}"
    );
}

#[test]
fn tail_json_repeats_bit_identically() {
    let args = [
        "tail", "--p", "2", "--n", "200", "--k", "14", "--r", "0.3", "--method", "tilted",
        "--samples", "100000", "--seed", "7",
    ];
    let first = stdout(&projrate(&args));
    let second = stdout(&projrate(&args));
    assert_eq!(first, second, "repeat run must be bit-identical");
    let row: serde_json::Value =
        serde_json::from_str(first.lines().nth(1).expect("report line")).unwrap();
    let log_rate = row["log_rate"].as_f64().expect("log_rate field");
    assert!(log_rate.is_finite() && log_rate > 0.0);
    for key in ["method", "n", "k", "p", "r", "p_hat", "stderr", "ess", "seed", "frame_seed"] {
        assert!(row.get(key).is_some(), "missing field {key}");
    }
}

#[test]
fn exit_codes_separate_config_and_domain_failures() {
    let unknown = projrate(&["tail", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2), "unknown flag");
    assert!(
        String::from_utf8_lossy(&unknown.stderr).contains("--help"),
        "usage text on unknown flag"
    );
    let missing = projrate(&["rate", "--p", "2"]);
    assert_eq!(missing.status.code(), Some(2), "missing level flag");
    let bad_p = projrate(&["rate", "--p", "0.5", "--r", "0.3"]);
    assert_eq!(bad_p.status.code(), Some(2), "p below the oracle domain");
    let refused = projrate(&[
        "tail", "--p", "2", "--n", "40", "--k", "4", "--r", "1.5", "--samples", "100",
    ]);
    assert_eq!(refused.status.code(), Some(3), "tilt toward an impossible event");
    let help = projrate(&["--help"]);
    assert_eq!(help.status.code(), Some(0), "help exits cleanly");
}

#[test]
fn outputs_regenerate_themselves_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let path_str = path.to_str().unwrap();
    let out = projrate(&[
        "tail", "--p", "2", "--n", "60", "--k", "5", "--r", "0.35", "--samples", "20000",
        "--seed", "3", "--frame-seed", "4", "--output", path_str,
    ]);
    assert!(out.status.success());
    let saved = std::fs::read(&path).unwrap();
    let rerun = projrate(&["tail", "--config", path_str]);
    assert!(rerun.status.success(), "{}", String::from_utf8_lossy(&rerun.stderr));
    let regenerated = std::fs::read(&path).unwrap();
    assert_eq!(saved, regenerated, "embedded config must regenerate the run");
}

#[test]
fn relative_outputs_resolve_against_the_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_projrate"))
        .args(["weingarten", "--moment", "a12^2", "--n", "6", "--output", "m.csv"])
        .env("PROJRATE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    let value: f64 = text.lines().nth(2).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((value - 1.0 / 6.0).abs() < 1e-15, "E[a12^2] = 1/n");
}

#[test]
fn sample_projection_emits_one_row_per_coordinate() {
    let out = projrate(&[
        "sample", "--what", "projection", "--p", "2", "--n", "40", "--k", "3", "--count",
        "2", "--seed", "1", "--frame-seed", "2",
    ]);
    let text = stdout(&out);
    let data: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(data.len(), 6, "2 draws x 3 coordinates");
    for line in data {
        let v: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(v.is_finite() && v.abs() < 1.0);
    }
}

#[test]
fn check_moment_match_reports_a_near_unit_ratio() {
    let out = projrate(&[
        "check", "--what", "moment-match", "--n", "50", "--k", "2", "--alpha", "2",
        "--beta", "2", "--col", "1", "--u", "0.7071067811865476,0.7071067811865476",
    ]);
    let text = stdout(&out);
    let row: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    let ratio = row["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 0.2, "degree-4 ratio {ratio} should be 1 + O(1/n)");
}
