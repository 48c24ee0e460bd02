//! Density `P(x)` over an `(ln α, x)` grid at fixed mean energy, as CSV with
//! header `ln_alpha,x,pdf`. Rows are α-major.

use std::fmt::Write as _;

use clap::Args;
use rtmetro::{EnergyBudget, ProbeDistribution};

use crate::config::ConfigFile;
use crate::format::sci;
use crate::sweep::{AlphaGrid, Spacing};
use crate::{write_output, CliError, CommonArgs, Outcome};

pub const CSV_HEADER: &str = "ln_alpha,x,pdf";

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConfig {
    pub energy: f64,
    pub alpha_grid: AlphaGrid,
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self {
            energy: 1.0,
            alpha_grid: AlphaGrid { min: 0.6, max: 20.0, count: 40, spacing: Spacing::Log },
            x_min: -3.0,
            x_max: 3.0,
            x_count: 121,
        }
    }
}

impl SurfaceConfig {
    pub fn x_points(&self) -> Vec<f64> {
        let last = (self.x_count - 1).max(1) as f64;
        (0..self.x_count)
            .map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / last)
            .collect()
    }
}

pub fn surface_csv(cfg: &SurfaceConfig) -> Result<String, CliError> {
    cfg.alpha_grid.validate()?;
    if cfg.x_count < 2 || !(cfg.x_max > cfg.x_min) || !cfg.x_min.is_finite() || !cfg.x_max.is_finite() {
        return Err(CliError::Usage(format!(
            "x grid needs x-min < x-max and x-count >= 2, got {}..{} x {}",
            cfg.x_min, cfg.x_max, cfg.x_count
        )));
    }
    let budget = EnergyBudget::new(cfg.energy)?;
    let xs = cfg.x_points();
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for alpha in cfg.alpha_grid.points() {
        let d = ProbeDistribution::from_shape_energy(alpha, budget)?;
        for &x in &xs {
            let _ = writeln!(s, "{},{},{}", sci(alpha.ln()), sci(x), sci(d.pdf(x)));
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Log-spaced shape values between the bounds.
    #[arg(long)]
    pub alpha_count: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub x_count: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const CONFIG_KEYS: &[&str] = &[
    "energy", "alpha-min", "alpha-max", "alpha-count", "x-min", "x-max", "x-count", "out",
];

pub fn run(args: &SurfaceArgs) -> Result<Outcome, CliError> {
    let file = ConfigFile::load(args.common.config.as_deref(), CONFIG_KEYS)?;
    let mut cfg = SurfaceConfig::default();
    if let Some(v) = file.or(args.energy, "energy")? {
        cfg.energy = v;
    }
    if let Some(v) = file.or(args.alpha_min, "alpha-min")? {
        cfg.alpha_grid.min = v;
    }
    if let Some(v) = file.or(args.alpha_max, "alpha-max")? {
        cfg.alpha_grid.max = v;
    }
    if let Some(v) = file.or(args.alpha_count, "alpha-count")? {
        cfg.alpha_grid.count = v;
    }
    if let Some(v) = file.or(args.x_min, "x-min")? {
        cfg.x_min = v;
    }
    if let Some(v) = file.or(args.x_max, "x-max")? {
        cfg.x_max = v;
    }
    if let Some(v) = file.or(args.x_count, "x-count")? {
        cfg.x_count = v;
    }
    let out = file.or(args.common.out.clone(), "out")?;
    write_output(out.as_deref(), &surface_csv(&cfg)?)?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_shapes_without_finite_energy() {
        let mut cfg = SurfaceConfig::default();
        cfg.alpha_grid.min = 0.5;
        let err = surface_csv(&cfg).unwrap_err();
        assert_eq!(err.code(), 2);
    }

    #[test]
    fn row_count_and_nonnegativity() {
        let cfg = SurfaceConfig {
            alpha_grid: AlphaGrid { min: 0.7, max: 3.0, count: 3, spacing: Spacing::Log },
            x_count: 5,
            ..SurfaceConfig::default()
        };
        let csv = surface_csv(&cfg).unwrap();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 15);
        for r in rows {
            let p: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
            assert!(p >= 0.0);
        }
    }
}
