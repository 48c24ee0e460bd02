//! Full self-check: closed-form/quadrature parity, the `F_q` gamma-argument
//! resolution, and the invariant suite. One line per check:
//!
//! ```text
//! PASS parity fisher alpha=2.00000000000e0 q=5.00000000000e-1 closed=... quadrature=... rel_dev=...
//! SKIP parity posterior_width alpha=... q=1.00000000000e0 (order q: posterior width is undefined at q = 1)
//! INFO triangle q=... alpha=... shifts=[...] lhs=... rhs=... violated=false
//! ```
//!
//! Only `PASS`/`FAIL` lines count toward the exit status.

use std::fmt::{self, Write as _};

use clap::Args;
use rayon::prelude::*;
use rtmetro::measures::{
    dq_linearized, dq_quadrature, fisher_closed_with_argument, fisher_generalized_closed,
    fisher_generalized_quadrature, mean_error_closed, triangle_probe, FisherGammaArgument,
};
use rtmetro::{EnergyBudget, Error, MeasureOrder, ProbeDistribution, ShiftSignal};

use crate::config::ConfigFile;
use crate::format::sci;
use crate::sweep::{evaluate_row, AlphaGrid, RowStatus, Spacing, SweepConfig, SweepQuantity};
use crate::{write_output, CliError, CommonArgs, Outcome};

pub const DEFAULT_Q: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const DEFAULT_ALPHAS: [f64; 5] = [0.8, 1.0, 2.0, 5.0, 20.0];
pub const LAW_ALPHAS: [f64; 5] = [0.6, 1.0, 2.0, 7.0, 50.0];
pub const LAW_ENERGIES: [f64; 3] = [0.25, 1.0, 9.0];
pub const LAW_TOL: f64 = 1e-9;
pub const LINEARIZATION_PAIRS: [(f64, f64); 4] = [(1.0, 0.5), (2.0, 0.5), (2.0, 2.0), (1.5, 0.25)];
pub const LINEARIZATION_SHIFT: f64 = 1e-3;
pub const CRAMER_RAO_TOL: f64 = 1e-9;
pub const ENERGY_TOL: f64 = 1e-9;
pub const TRIANGLE_SHIFTS: [[f64; 3]; 4] =
    [[-0.5, 0.0, 0.5], [0.0, 0.3, 1.5], [-1.0, 0.2, 0.4], [0.0, 0.05, 0.1]];

const QUANTITIES: [(SweepQuantity, &str); 4] = [
    (SweepQuantity::Fisher, "fisher"),
    (SweepQuantity::EpsMin, "eps_min"),
    (SweepQuantity::PosteriorWidth, "posterior_width"),
    (SweepQuantity::MeanError, "mean_error"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
            Verdict::Info => "INFO",
        })
    }
}

impl Verdict {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub verdict: Verdict,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckLine>,
    /// Free-form lines reported verbatim (the gamma-argument resolution).
    pub notes: Vec<String>,
    pub eq6_confirmed: bool,
}

impl VerifyReport {
    fn push(&mut self, verdict: Verdict, text: String) {
        self.checks.push(CheckLine { verdict, text });
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0 && self.eq6_confirmed
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for n in &self.notes {
            let _ = writeln!(s, "{n}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "{} {}", c.verdict, c.text);
        }
        let counted = self
            .checks
            .iter()
            .filter(|c| matches!(c.verdict, Verdict::Pass | Verdict::Fail))
            .count();
        let _ = writeln!(
            s,
            "summary: {counted} checks, {} failed, {}",
            self.failures(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub tol: f64,
    pub energy: f64,
    pub q_list: Vec<f64>,
    pub alphas: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            energy: 1.0,
            q_list: DEFAULT_Q.to_vec(),
            alphas: DEFAULT_ALPHAS.to_vec(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be > 0, got {}", self.tol)));
        }
        EnergyBudget::new(self.energy)?;
        if self.q_list.is_empty() || self.q_list.iter().any(|q| !(*q > 0.0) || !q.is_finite()) {
            return Err(CliError::Usage(format!("q list must be positive numbers, got {:?}", self.q_list)));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.5) || !a.is_finite()) {
            return Err(CliError::Usage(format!("alphas must be finite and > 0.5, got {:?}", self.alphas)));
        }
        Ok(())
    }

    fn budget(&self) -> EnergyBudget {
        EnergyBudget::new(self.energy).expect("validated energy")
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn parity(cfg: &VerifyConfig, report: &mut VerifyReport) {
    let sweep = SweepConfig {
        quantity: SweepQuantity::Fisher,
        q_list: cfg.q_list.clone(),
        energy: cfg.energy,
        alpha_grid: AlphaGrid { min: 1.0, max: 1.0, count: 2, spacing: Spacing::Linear },
        parity_tol: cfg.tol,
    };
    let jobs: Vec<(usize, f64, f64)> = (0..QUANTITIES.len())
        .flat_map(|k| {
            cfg.alphas
                .iter()
                .flat_map(move |&a| cfg.q_list.iter().map(move |&q| (k, a, q)))
        })
        .collect();
    let rows: Vec<_> = jobs
        .par_iter()
        .map(|&(k, a, q)| {
            let s = SweepConfig { quantity: QUANTITIES[k].0, ..sweep.clone() };
            evaluate_row(&s, a, q)
        })
        .collect();
    for (&(k, a, q), row) in jobs.iter().zip(&rows) {
        let name = QUANTITIES[k].1;
        let head = format!("parity {name} alpha={} q={}", sci(a), sci(q));
        match row.status {
            RowStatus::OutOfDomain => report.push(Verdict::Skip, format!("{head} (outside validity region)")),
            status => report.push(
                Verdict::from_pass(status == RowStatus::Ok),
                format!(
                    "{head} closed={} quadrature={} rel_dev={}",
                    sci(row.closed_value),
                    sci(row.quadrature_value),
                    sci(row.relative_deviation)
                ),
            ),
        }
    }
}

/// Gamma-argument resolution for `F_q`: the Gaussian anchor `F_{1/2} = 4/γ²`
/// plus agreement of each candidate with quadrature over the parity grid.
fn gamma_argument(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<(), CliError> {
    let resolved = FisherGammaArgument::Resolved;
    let rejected = FisherGammaArgument::Unscaled;
    let d = ProbeDistribution::from_shape_energy(2.0, cfg.budget())?;
    let half = MeasureOrder::new(0.5)?;
    let anchor = 4.0 / (d.gamma_scale() * d.gamma_scale());
    let quad = fisher_generalized_quadrature(&d, half)?.value;
    let good = fisher_closed_with_argument(&d, half, resolved)?.value;
    let bad = fisher_closed_with_argument(&d, half, rejected)?.value;
    let anchor_ok = rel(good, anchor) <= cfg.tol && rel(quad, anchor) <= cfg.tol;
    report.push(
        Verdict::from_pass(anchor_ok),
        format!(
            "gaussian_anchor alpha=2 q=0.5 expected={} closed={} quadrature={}",
            sci(anchor),
            sci(good),
            sci(quad)
        ),
    );

    let mut agree = [0usize; 2];
    let mut compared = 0usize;
    for &a in &cfg.alphas {
        let d = ProbeDistribution::from_shape_energy(a, cfg.budget())?;
        for &q in &cfg.q_list {
            if q == 1.0 {
                // Both candidates coincide.
                continue;
            }
            let o = MeasureOrder::new(q)?;
            let Ok(r) = fisher_closed_with_argument(&d, o, resolved) else {
                continue;
            };
            let quad = match fisher_generalized_quadrature(&d, o) {
                Ok(v) => v.value,
                Err(Error::NoConvergence(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let u = fisher_closed_with_argument(&d, o, rejected)?;
            compared += 1;
            agree[0] += usize::from(rel(r.value, quad) <= cfg.tol);
            agree[1] += usize::from(rel(u.value, quad) <= cfg.tol);
        }
    }
    report.eq6_confirmed = anchor_ok && rel(bad, anchor) > cfg.tol && agree[0] == compared;
    report.notes.push(format!(
        "eq6_argument: {} {}",
        resolved.formula(),
        if report.eq6_confirmed { "CONFIRMED" } else { "NOT CONFIRMED" }
    ));
    report.notes.push(format!(
        "eq6_rejected: {} gives F={} at the gaussian anchor (expected {}, rel_dev={}); matches quadrature at {}/{} grid points with q != 1",
        rejected.formula(),
        sci(bad),
        sci(anchor),
        sci(rel(bad, anchor)),
        agree[1],
        compared
    ));
    report.notes.push(format!(
        "eq6_resolved: {} matches quadrature at {}/{} grid points with q != 1",
        resolved.formula(),
        agree[0],
        compared
    ));
    Ok(())
}

fn energy_round_trip(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<(), CliError> {
    for &a in &cfg.alphas {
        let d = ProbeDistribution::from_shape_energy(a, cfg.budget())?;
        let e = d.mean_energy_quadrature()?.value;
        report.push(
            Verdict::from_pass(rel(e, cfg.energy) <= ENERGY_TOL),
            format!("energy alpha={} expected={} quadrature={}", sci(a), sci(cfg.energy), sci(e)),
        );
    }
    Ok(())
}

fn hellinger_law(report: &mut VerifyReport) -> Result<(), CliError> {
    let half = MeasureOrder::new(0.5)?;
    for a in LAW_ALPHAS {
        for e in LAW_ENERGIES {
            let d = ProbeDistribution::from_shape_energy(a, EnergyBudget::new(e)?)?;
            let v = rtmetro::measures::epsilon_min(&d, half)?.value;
            let want = 0.5 / e.sqrt();
            report.push(
                Verdict::from_pass((v - want).abs() <= LAW_TOL),
                format!("q_half_law alpha={} energy={} eps_min={} expected={}", sci(a), sci(e), sci(v), sci(want)),
            );
        }
    }
    Ok(())
}

/// `D_q(ε)` against its small-shift form at `ε = 10^-3`; returns the ratio.
pub fn linearization_ratio(alpha: f64, q: f64, energy: f64) -> rtmetro::Result<f64> {
    let d = ProbeDistribution::from_shape_energy(alpha, EnergyBudget::new(energy)?)?;
    let o = MeasureOrder::new(q)?;
    let shift = ShiftSignal(LINEARIZATION_SHIFT);
    Ok(dq_quadrature(&d, shift, o)?.value / dq_linearized(&d, shift, o)?.value)
}

fn linearization(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<(), CliError> {
    for (a, q) in LINEARIZATION_PAIRS {
        let ratio = linearization_ratio(a, q, cfg.energy)?;
        report.push(
            Verdict::from_pass((0.99..=1.01).contains(&ratio)),
            format!("linearization alpha={} q={} ratio={}", sci(a), sci(q), sci(ratio)),
        );
    }
    Ok(())
}

/// `Δε_{1/2} · √F_{1/2}` for the probe of shape `alpha` at the given energy.
pub fn cramer_rao_product(alpha: f64, energy: f64) -> rtmetro::Result<f64> {
    let d = ProbeDistribution::from_shape_energy(alpha, EnergyBudget::new(energy)?)?;
    let half = MeasureOrder::new(0.5)?;
    Ok(mean_error_closed(&d, half)?.value * fisher_generalized_closed(&d, half)?.value.sqrt())
}

/// Saturation holds at `α = 2` only; elsewhere the product exceeds 1 by more
/// than the tolerance.
pub fn cramer_rao_ok(alpha: f64, product: f64) -> bool {
    if alpha == 2.0 {
        (product - 1.0).abs() <= CRAMER_RAO_TOL
    } else {
        product - 1.0 > CRAMER_RAO_TOL
    }
}

fn cramer_rao(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<(), CliError> {
    let mut alphas = cfg.alphas.clone();
    if !alphas.contains(&2.0) {
        alphas.push(2.0);
    }
    for a in alphas {
        let p = cramer_rao_product(a, cfg.energy)?;
        report.push(
            Verdict::from_pass(cramer_rao_ok(a, p)),
            format!("cramer_rao alpha={} product={}", sci(a), sci(p)),
        );
    }
    Ok(())
}

/// Triangle inequality for `D_q^q`: enforced at `q = 1/2`, scanned elsewhere.
fn triangle(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<(), CliError> {
    let mut orders = cfg.q_list.clone();
    if !orders.contains(&0.5) {
        orders.push(0.5);
    }
    let jobs: Vec<(f64, f64, [f64; 3])> = orders
        .iter()
        .flat_map(|&q| {
            cfg.alphas
                .iter()
                .flat_map(move |&a| TRIANGLE_SHIFTS.iter().map(move |&s| (q, a, s)))
        })
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(q, a, s)| {
            let d = ProbeDistribution::from_shape_energy(a, EnergyBudget::new(cfg.energy)?)?;
            triangle_probe(&d, MeasureOrder::new(q)?, s)
        })
        .collect();
    let mut violations = 0usize;
    for (&(q, a, s), r) in jobs.iter().zip(results) {
        let head = format!("triangle q={} alpha={} shifts={s:?}", sci(q), sci(a));
        match r {
            Ok(t) => {
                let verdict = if q == 0.5 {
                    Verdict::from_pass(!t.violated)
                } else {
                    violations += usize::from(t.violated);
                    Verdict::Info
                };
                report.push(
                    verdict,
                    format!("{head} lhs={} rhs={} violated={}", sci(t.lhs), sci(t.rhs), t.violated),
                );
            }
            Err(e) if q == 0.5 => report.push(Verdict::Fail, format!("{head} ({e})")),
            Err(e) => report.push(Verdict::Info, format!("{head} ({e})")),
        }
    }
    report.push(
        Verdict::Info,
        format!("triangle_scan violations at q != 1/2: {violations}"),
    );
    Ok(())
}

/// `Δε_q · F_q^q`, reported without a bound.
fn products(cfg: &VerifyConfig, report: &mut VerifyReport) -> Result<(), CliError> {
    for &a in &cfg.alphas {
        let d = ProbeDistribution::from_shape_energy(a, cfg.budget())?;
        for &q in &cfg.q_list {
            let o = MeasureOrder::new(q)?;
            let Ok(f) = fisher_generalized_closed(&d, o) else {
                continue;
            };
            let err = mean_error_closed(&d, o)?.value;
            report.push(
                Verdict::Info,
                format!("error_fisher_product alpha={} q={} value={}", sci(a), sci(q), sci(err * f.value.powf(q))),
            );
        }
    }
    Ok(())
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport, CliError> {
    cfg.validate()?;
    let mut report = VerifyReport::default();
    gamma_argument(cfg, &mut report)?;
    parity(cfg, &mut report);
    energy_round_trip(cfg, &mut report)?;
    hellinger_law(&mut report)?;
    linearization(cfg, &mut report)?;
    cramer_rao(cfg, &mut report)?;
    triangle(cfg, &mut report)?;
    products(cfg, &mut report)?;
    Ok(report)
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Relative parity tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub energy: Option<f64>,
    /// Comma-separated orders q.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Comma-separated shape parameters.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const CONFIG_KEYS: &[&str] = &["tol", "energy", "q", "alphas", "out"];

pub fn run(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let file = ConfigFile::load(args.common.config.as_deref(), CONFIG_KEYS)?;
    let mut cfg = VerifyConfig::default();
    if let Some(v) = file.or(args.tol, "tol")? {
        cfg.tol = v;
    }
    if let Some(v) = file.or(args.energy, "energy")? {
        cfg.energy = v;
    }
    if let Some(v) = file.or_list(args.q.clone(), "q")? {
        cfg.q_list = v;
    }
    if let Some(v) = file.or_list(args.alphas.clone(), "alphas")? {
        cfg.alphas = v;
    }
    let out = file.or(args.common.out.clone(), "out")?;
    let report = run_verify(&cfg)?;
    write_output(out.as_deref(), &report.render())?;
    Ok(Outcome::from_pass(report.passed()))
}
