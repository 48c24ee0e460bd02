use std::fs;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_rtmetro");

fn rtmetro(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn rtmetro")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_default_confirms_gamma_argument() {
    let out = rtmetro(&["verify"]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    let report = text(&out);
    assert!(report.contains("eq6_argument: (alpha+q-1)/(alpha*q) CONFIRMED"));
    assert!(report.contains("eq6_rejected: (alpha+q-1)/alpha"));
    assert!(!report.lines().any(|l| l.starts_with("FAIL")));
    assert!(report.lines().any(|l| l.starts_with("SKIP parity posterior_width")));
}

#[test]
fn verify_below_numeric_floor_fails() {
    let out = rtmetro(&["verify", "--tol", "1e-15"]);
    assert_eq!(code(&out), 1);
    assert!(text(&out).lines().any(|l| l.starts_with("FAIL parity")));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.conf");
    for body in ["tol 1e-6\n", "colour = red\n", "tol = tiny\n", "q = 0.5\nq = 2\n"] {
        fs::write(&cfg, body).unwrap();
        let out = rtmetro(&["verify", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "config {body:?}");
    }
    let missing = dir.path().join("absent.conf");
    assert_eq!(code(&rtmetro(&["sweep", "--config", missing.to_str().unwrap()])), 2);
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("sweep.conf");
    fs::write(
        &cfg,
        "# small sweep\nquantity = eps_min\nq = 0.5\nalpha_min = 1\nalpha-max = 4\ncount = 3\n",
    )
    .unwrap();
    let out = rtmetro(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = text(&out);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(2).unwrap().starts_with("2.00000000000e0,5.00000000000e-1,"));

    let out = rtmetro(&["sweep", "--config", cfg.to_str().unwrap(), "--count", "5"]);
    assert_eq!(text(&out).lines().count(), 6);
}

#[test]
fn sweep_keeps_out_of_domain_rows() {
    let out = rtmetro(&[
        "sweep", "--quantity", "posterior_width", "--q", "0.5,1", "--alpha-min", "0.8", "--alpha-max",
        "3", "--count", "4",
    ]);
    assert_eq!(code(&out), 0);
    let csv = text(&out);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for (i, r) in rows.iter().enumerate() {
        let want = if i % 2 == 1 { "out_of_domain" } else { "ok" };
        assert!(r.ends_with(want), "{r}");
    }
}

#[test]
fn sweep_hellinger_column_is_flat() {
    let out = rtmetro(&["sweep", "--quantity", "eps_min", "--q", "0.5", "--energy", "4"]);
    assert_eq!(code(&out), 0);
    for row in text(&out).lines().skip(1) {
        let closed: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
        assert!((closed - 0.25).abs() < 1e-9, "{row}");
    }
}

#[test]
fn sweep_rejects_bad_grids() {
    assert_eq!(code(&rtmetro(&["sweep", "--quantity", "fisher", "--count", "1"])), 2);
    assert_eq!(code(&rtmetro(&["sweep", "--quantity", "fisher", "--energy", "-1"])), 2);
    assert_eq!(code(&rtmetro(&["sweep", "--q", "0.5"])), 2);
    assert_eq!(code(&rtmetro(&["sweep", "--quantity", "entropy"])), 2);
}

#[test]
fn sweep_output_file_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = rtmetro(&["sweep", "--quantity", "fisher", "--q", "0.25,2", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn simulate_reports_json_and_is_reproducible() {
    let args = ["simulate", "--alpha", "1", "--gamma", "1", "--q", "1", "--eps", "2.3", "--trials", "20000", "--seed", "7"];
    let first = rtmetro(&args);
    assert_eq!(code(&first), 0, "{}", text(&first));
    let second = rtmetro(&args);
    assert_eq!(first.stdout, second.stdout);
    let r: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "trials", "seed", "true_shift", "q", "empirical_mean", "mean_std_error",
        "empirical_generalized_error", "generalized_error_ci_low", "generalized_error_ci_high",
        "bootstrap_resamples", "predicted_mean_error", "max_abs_deviation",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(keys.len(), 12);
    assert!((r["predicted_mean_error"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn simulate_usage_errors() {
    assert_eq!(code(&rtmetro(&["simulate", "--alpha", "2", "--trials", "0"])), 2);
    assert_eq!(code(&rtmetro(&["simulate", "--alpha", "2", "--energy", "1", "--gamma", "1"])), 2);
    assert_eq!(code(&rtmetro(&["simulate", "--energy", "1"])), 2);
    assert_eq!(code(&rtmetro(&["simulate", "--alpha", "0.4", "--trials", "10"])), 2);
    assert_eq!(code(&rtmetro(&["simulate", "--alpha", "2", "--q", "0", "--trials", "10"])), 2);
}

#[test]
fn simulate_energy_and_gamma_conflict_in_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("sim.conf");
    fs::write(&cfg, "alpha = 2\nenergy = 1\ntrials = 100\n").unwrap();
    let ok = rtmetro(&["simulate", "--config", cfg.to_str().unwrap(), "--resamples", "100"]);
    assert_ne!(code(&ok), 2);
    let out = rtmetro(&["simulate", "--config", cfg.to_str().unwrap(), "--gamma", "1"]);
    assert_eq!(code(&out), 2);
}

fn surface_value(csv: &str, ln_alpha: f64, x: f64) -> f64 {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|f| (f[0] - ln_alpha).abs() < 1e-12 && f[1] == x)
        .map(|f| f[2])
        .expect("row present")
}

#[test]
fn surface_anchor_rows() {
    let out = rtmetro(&[
        "surface", "--alpha-min", "1", "--alpha-max", "2", "--alpha-count", "2", "--x-min", "-3",
        "--x-max", "3", "--x-count", "7",
    ]);
    assert_eq!(code(&out), 0);
    let csv = text(&out);
    assert!(csv.starts_with("ln_alpha,x,pdf\n"));
    assert_eq!(csv.lines().count(), 15);
    assert!((surface_value(&csv, 2f64.ln(), 0.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-11);
    assert!((surface_value(&csv, 0.0, 0.0) - 1.0).abs() < 1e-11);
}

#[test]
fn surface_default_grid_is_nonnegative() {
    let out = rtmetro(&["surface"]);
    assert_eq!(code(&out), 0);
    let csv = text(&out);
    assert_eq!(csv.lines().count(), 1 + 40 * 121);
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn surface_rejects_shapes_at_or_below_half() {
    assert_eq!(code(&rtmetro(&["surface", "--alpha-min", "0.5"])), 2);
    assert_eq!(code(&rtmetro(&["surface", "--x-count", "1"])), 2);
}
