//! End-to-end tests of the `catphase` binary: output values, exit codes, and
//! cross-command consistency.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catphase"))
}

fn run(args: &[&str], outdir: &Path) -> Output {
    bin()
        .args(args)
        .args(["--out", outdir.to_str().unwrap()])
        .output()
        .expect("binary should spawn")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Parses a two-column `quantity,value` CSV.
fn read_kv(path: &Path) -> HashMap<String, String> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .filter_map(|l| l.split_once(','))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn get_f64(kv: &HashMap<String, String>, key: &str) -> f64 {
    kv[key].parse().unwrap()
}

#[test]
fn bounds_reports_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(&["bounds"], dir.path()));
    let kv = read_kv(&dir.path().join("bounds.csv"));
    assert_eq!(kv["weak_scale"], "1.0000000000000000e-3");
    assert!((get_f64(&kv, "cr") - 5.0254303961693845e-5).abs() < 1e-18);
    assert!((get_f64(&kv, "zz_exact") - 3.7708542288660434e-5).abs() < 1e-12);
    assert!((get_f64(&kv, "bcr") - 5.0268744713944897e-5).abs() < 1e-12);
    assert_eq!(kv["c1_ok"], "true");
    assert_eq!(kv["c2_ok"], "true");
    assert!(dir.path().join("bounds.manifest.txt").exists());
}

#[test]
fn invalid_prior_width_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["bounds", "--W", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("prior width must be positive"),
        "unexpected stderr: {stderr}"
    );
}

#[test]
fn zero_trials_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--trials", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nu_out_of_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["bounds", "--nu", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_summary_tracks_expected_precision() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(&["simulate", "--trials", "4000", "--seed", "5"], dir.path()));
    let kv = read_kv(&dir.path().join("simulate_summary.csv"));
    let rmse = get_f64(&kv, "rmse");
    assert!((rmse - 5e-5).abs() / 5e-5 < 0.05, "rmse {rmse} far from 5e-5");
    assert_eq!(kv["clamp_warning"], "false");
    let records = std::fs::read_to_string(dir.path().join("simulate_records.csv")).unwrap();
    assert_eq!(records.lines().count(), 4001);
    assert!(records.starts_with("index,phi_true,k,phi_hat,error,clamped\n"));
}

#[test]
fn reproduce_fig1_matches_headline() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(&["reproduce", "fig1"], dir.path()));
    let kv = read_kv(&dir.path().join("reproduce_fig1_summary.csv"));
    let sigma = get_f64(&kv, "sqrt_variance");
    assert!((sigma - 5e-5).abs() / 5e-5 < 0.005);
    assert!((get_f64(&kv, "ratio_vs_weak") - 0.05).abs() < 0.0005);
    assert!((get_f64(&kv, "ratio_vs_strong") - 50.0).abs() < 0.5);
    assert!(get_f64(&kv, "curve_deviation") < 0.02);
    assert_eq!(kv["c1_ok"], "true");
    assert_eq!(kv["c2_ok"], "true");
    assert!(dir.path().join("reproduce_fig1_curves.csv").exists());
}

#[test]
fn reproduce_fig2_sits_near_twice_strong_limit() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(&["reproduce", "fig2"], dir.path()));
    let kv = read_kv(&dir.path().join("reproduce_fig2_summary.csv"));
    let ratio = get_f64(&kv, "ratio_vs_strong");
    assert!((1.7..=2.1).contains(&ratio), "ratio {ratio}");
    assert!(get_f64(&kv, "curve_deviation") < 0.05);
}

#[test]
fn sweep_over_m_scales_as_inverse_root_m() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(
        &["sweep", "--param", "m", "--values", "1e4,1e6"],
        dir.path(),
    ));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            l.split(',')
                .map(|v| v.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    assert_eq!(rows.len(), 2);
    for name in ["weak_scale", "qcr", "zz_closed"] {
        let ratio = rows[0][col(name)] / rows[1][col(name)];
        assert!(
            (ratio - 10.0).abs() < 1e-6 * 10.0,
            "{name} ratio {ratio} != sqrt(1e6/1e4)"
        );
    }
}

#[test]
fn single_point_sweep_agrees_with_bounds() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(&["bounds"], dir.path()));
    assert_success(&run(&["sweep", "--param", "m", "--values", "1e6"], dir.path()));
    let kv = read_kv(&dir.path().join("bounds.csv"));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    for name in ["weak_scale", "strong_scale", "cr", "qcr", "zz_exact", "zz_closed", "bcr"] {
        let i = header.iter().position(|h| *h == name).unwrap();
        assert_eq!(row[i], kv[name], "{name} differs between sweep and bounds");
    }
}

#[test]
fn sweep_nu_holding_mnu2_keeps_ratio_near_twice_strong() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(
        &[
            "sweep", "--param", "nu", "--values", "0.02,0.03,0.05", "--hold-mnu2", "14.4",
            "--with-mc", "--trials", "2000",
        ],
        dir.path(),
    ));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    for line in lines {
        let row: Vec<&str> = line.split(',').collect();
        let rmse: f64 = row[col("rmse")].parse().unwrap();
        let strong: f64 = row[col("strong_scale")].parse().unwrap();
        let ratio = rmse / strong;
        // fixed m*nu^2 pins rmse at a constant multiple of the strong scale
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio} at row {line}");
    }
}

#[test]
fn hold_mnu2_rejected_for_non_nu_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["sweep", "--param", "m", "--values", "1e4", "--hold-mnu2", "14.4"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "W = 2e-3\nnu = 0.05 # probe amplitude\n").unwrap();
    let out = bin()
        .args(["bounds", "--config", cfg.to_str().unwrap(), "--nu", "0.1"])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_success(&out);
    let manifest = std::fs::read_to_string(dir.path().join("bounds.manifest.txt")).unwrap();
    assert!(manifest.contains("W = 2.0000000000000000e-3"));
    assert!(manifest.contains("nu = 1.0000000000000001e-1"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "wat = 1\n").unwrap();
    let out = run(&["bounds", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
