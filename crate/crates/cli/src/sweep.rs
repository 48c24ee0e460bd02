//! `(α, q)` sweeps of one quantity at fixed mean energy, written as CSV:
//!
//! ```text
//! alpha,q,energy,gamma,closed,quadrature,rel_dev,status
//! ```
//!
//! Rows are α-major, then in `q` list order. Every grid point produces a row;
//! points outside a formula's validity region carry `out_of_domain`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use rtmetro::measures::{
    epsilon_min, epsilon_min_quadrature, fisher_generalized_closed, fisher_generalized_quadrature,
    mean_error_closed, mean_error_quadrature, posterior_width_closed, posterior_width_quadrature,
};
use rtmetro::{EnergyBudget, Error, MeasureOrder, MeasureValue, ProbeDistribution, ShiftSignal};

use crate::config::ConfigFile;
use crate::format::sci;
use crate::{write_output, CliError, CommonArgs, Outcome};

pub const CSV_HEADER: &str = "alpha,q,energy,gamma,closed,quadrature,rel_dev,status";
pub const DEFAULT_PARITY_TOL: f64 = 1e-6;
pub const DEFAULT_ALPHA_MAX: f64 = 100.0;
pub const DEFAULT_ALPHA_COUNT: usize = 60;
/// Distance kept from the `α > 1 - q` integrability edge by the default grid.
pub const EDGE_OFFSET: f64 = 0.002;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepQuantity {
    EpsMin,
    PosteriorWidth,
    MeanError,
    Fisher,
}

impl std::str::FromStr for SweepQuantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

impl std::str::FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl AlphaGrid {
    /// Log-spaced default from `max(0.51, 1 - min(q) + 0.002)` to 100.
    pub fn default_for(q_list: &[f64]) -> Self {
        let q_min = q_list.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            min: default_alpha_min(q_min),
            max: DEFAULT_ALPHA_MAX,
            count: DEFAULT_ALPHA_COUNT,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.min > 0.0) || !(self.max >= self.min) || !self.max.is_finite() {
            return Err(CliError::Usage(format!(
                "alpha grid needs 0 < alpha-min <= alpha-max, got {}..{}",
                self.min, self.max
            )));
        }
        if self.count < 2 {
            return Err(CliError::Usage(format!("alpha count must be >= 2, got {}", self.count)));
        }
        Ok(())
    }

    /// Grid points; the ends are exactly `min` and `max`.
    pub fn points(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == last {
                    return self.max;
                }
                let f = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                    Spacing::Linear => self.min + f * (self.max - self.min),
                }
            })
            .collect()
    }
}

pub fn default_alpha_min(q_min: f64) -> f64 {
    0.51f64.max(1.0 - q_min + EDGE_OFFSET)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub quantity: SweepQuantity,
    pub q_list: Vec<f64>,
    pub energy: f64,
    pub alpha_grid: AlphaGrid,
    pub parity_tol: f64,
}

impl SweepConfig {
    /// Default grid for `q_list` at the given energy.
    pub fn new(quantity: SweepQuantity, q_list: Vec<f64>, energy: f64) -> Self {
        let alpha_grid = AlphaGrid::default_for(&q_list);
        Self {
            quantity,
            q_list,
            energy,
            alpha_grid,
            parity_tol: DEFAULT_PARITY_TOL,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.q_list.is_empty() || self.q_list.iter().any(|q| !(*q > 0.0) || !q.is_finite()) {
            return Err(CliError::Usage(format!("q list must be positive numbers, got {:?}", self.q_list)));
        }
        EnergyBudget::new(self.energy)?;
        if !(self.parity_tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be > 0, got {}", self.parity_tol)));
        }
        self.alpha_grid.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    OutOfDomain,
    /// Quadrature failed, or converged outside the parity tolerance.
    NoConverge,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::OutOfDomain => "out_of_domain",
            RowStatus::NoConverge => "no_converge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub q: f64,
    pub energy: f64,
    pub gamma_scale: f64,
    pub closed_value: f64,
    pub quadrature_value: f64,
    pub relative_deviation: f64,
    pub status: RowStatus,
}

impl SweepRow {
    fn out_of_domain(alpha: f64, q: f64, energy: f64, gamma_scale: f64) -> Self {
        Self {
            alpha,
            q,
            energy,
            gamma_scale,
            closed_value: f64::NAN,
            quadrature_value: f64::NAN,
            relative_deviation: f64::NAN,
            status: RowStatus::OutOfDomain,
        }
    }
}

fn closed(quantity: SweepQuantity, d: &ProbeDistribution, o: MeasureOrder) -> rtmetro::Result<MeasureValue> {
    match quantity {
        SweepQuantity::EpsMin => epsilon_min(d, o),
        SweepQuantity::PosteriorWidth => posterior_width_closed(d, o),
        SweepQuantity::MeanError => mean_error_closed(d, o),
        SweepQuantity::Fisher => fisher_generalized_closed(d, o),
    }
}

fn quadrature(
    quantity: SweepQuantity,
    d: &ProbeDistribution,
    o: MeasureOrder,
) -> rtmetro::Result<MeasureValue> {
    match quantity {
        SweepQuantity::EpsMin => epsilon_min_quadrature(d, o),
        SweepQuantity::PosteriorWidth => posterior_width_quadrature(d, o),
        SweepQuantity::MeanError => mean_error_quadrature(d, ShiftSignal(0.0), o),
        SweepQuantity::Fisher => fisher_generalized_quadrature(d, o),
    }
}

pub fn evaluate_row(cfg: &SweepConfig, alpha: f64, q: f64) -> SweepRow {
    let energy = cfg.energy;
    let budget = EnergyBudget::new(energy).expect("validated energy");
    let Ok(d) = ProbeDistribution::from_shape_energy(alpha, budget) else {
        return SweepRow::out_of_domain(alpha, q, energy, f64::NAN);
    };
    let gamma_scale = d.gamma_scale();
    let o = MeasureOrder::new(q).expect("validated order");
    let closed_value = match closed(cfg.quantity, &d, o) {
        Ok(v) => v.value,
        Err(_) => return SweepRow::out_of_domain(alpha, q, energy, gamma_scale),
    };
    let (quadrature_value, converged) = match quadrature(cfg.quantity, &d, o) {
        Ok(v) => (v.value, true),
        Err(Error::NoConvergence(r)) => (r.value, false),
        Err(Error::Domain { .. }) => return SweepRow::out_of_domain(alpha, q, energy, gamma_scale),
        Err(_) => (f64::NAN, false),
    };
    let relative_deviation = ((quadrature_value - closed_value) / closed_value).abs();
    let status = if converged && relative_deviation <= cfg.parity_tol {
        RowStatus::Ok
    } else {
        RowStatus::NoConverge
    };
    SweepRow {
        alpha,
        q,
        energy,
        gamma_scale,
        closed_value,
        quadrature_value,
        relative_deviation,
        status,
    }
}

/// Evaluates every grid point; row order is fixed regardless of parallelism.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let points: Vec<(f64, f64)> = cfg
        .alpha_grid
        .points()
        .into_iter()
        .flat_map(|a| cfg.q_list.iter().map(move |&q| (a, q)))
        .collect();
    Ok(points.par_iter().map(|&(a, q)| evaluate_row(cfg, a, q)).collect())
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            sci(r.alpha),
            sci(r.q),
            sci(r.energy),
            sci(r.gamma_scale),
            sci(r.closed_value),
            sci(r.quadrature_value),
            sci(r.relative_deviation),
            r.status.as_str()
        );
    }
    s
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Quantity to tabulate.
    #[arg(long, value_enum)]
    pub quantity: Option<SweepQuantity>,
    /// Comma-separated orders q.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Mean energy <p^2> fixing the width of each probe.
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Parity tolerance between closed form and quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const CONFIG_KEYS: &[&str] = &[
    "quantity", "q", "energy", "alpha-min", "alpha-max", "count", "spacing", "tol", "out",
];

impl SweepArgs {
    pub fn resolve(&self) -> Result<(SweepConfig, Option<PathBuf>), CliError> {
        let file = ConfigFile::load(self.common.config.as_deref(), CONFIG_KEYS)?;
        let quantity = file
            .or(self.quantity, "quantity")?
            .ok_or_else(|| CliError::Usage("--quantity is required".into()))?;
        let q_list = file.or_list(self.q.clone(), "q")?.unwrap_or_else(|| vec![0.25, 0.5, 2.0]);
        let energy = file.or(self.energy, "energy")?.unwrap_or(1.0);
        let mut cfg = SweepConfig::new(quantity, q_list, energy);
        if let Some(v) = file.or(self.alpha_min, "alpha-min")? {
            cfg.alpha_grid.min = v;
        }
        if let Some(v) = file.or(self.alpha_max, "alpha-max")? {
            cfg.alpha_grid.max = v;
        }
        if let Some(v) = file.or(self.count, "count")? {
            cfg.alpha_grid.count = v;
        }
        if let Some(v) = file.or(self.spacing, "spacing")? {
            cfg.alpha_grid.spacing = v;
        }
        if let Some(v) = file.or(self.tol, "tol")? {
            cfg.parity_tol = v;
        }
        let out = file.or(self.common.out.clone(), "out")?;
        cfg.validate()?;
        Ok((cfg, out))
    }
}

pub fn run(args: &SweepArgs) -> Result<Outcome, CliError> {
    let (cfg, out) = args.resolve()?;
    let rows = run_sweep(&cfg)?;
    write_output(out.as_deref(), &to_csv(&rows))?;
    let failed = rows.iter().filter(|r| r.status == RowStatus::NoConverge).count();
    if failed > 0 {
        eprintln!("{failed} row(s) did not converge to parity");
    }
    Ok(Outcome::from_pass(failed == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_are_exact() {
        let g = AlphaGrid { min: 0.752, max: 100.0, count: 60, spacing: Spacing::Log };
        let p = g.points();
        assert_eq!(p.len(), 60);
        assert_eq!(p[0], 0.752);
        assert_eq!(p[59], 100.0);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        let lin = AlphaGrid { spacing: Spacing::Linear, count: 3, min: 1.0, max: 2.0 }.points();
        assert_eq!(lin, vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn default_lower_bound() {
        assert_eq!(default_alpha_min(2.0), 0.51);
        assert!((default_alpha_min(0.25) - 0.752).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_rows_are_kept() {
        let mut cfg = SweepConfig::new(SweepQuantity::PosteriorWidth, vec![0.5, 1.0], 1.0);
        cfg.alpha_grid = AlphaGrid { min: 0.4, max: 2.0, count: 3, spacing: Spacing::Linear };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        // alpha = 0.4 has no finite energy; q = 1 has no width.
        assert_eq!(rows[0].status, RowStatus::OutOfDomain);
        assert!(rows[0].gamma_scale.is_nan());
        assert_eq!(rows[1].status, RowStatus::OutOfDomain);
        assert_eq!(rows[2].status, RowStatus::Ok);
        assert_eq!(rows[3].status, RowStatus::OutOfDomain);
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with(CSV_HEADER));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SweepConfig::new(SweepQuantity::Fisher, vec![0.5], 1.0);
        cfg.alpha_grid.count = 1;
        assert!(cfg.validate().is_err());
        let cfg = SweepConfig::new(SweepQuantity::Fisher, vec![-0.5], 1.0);
        assert!(cfg.validate().is_err());
        let cfg = SweepConfig::new(SweepQuantity::Fisher, vec![0.5], 0.0);
        assert!(cfg.validate().is_err());
    }
}
