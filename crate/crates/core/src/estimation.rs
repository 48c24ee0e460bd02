//! Monte Carlo single-shot estimation: draw `x ~ P(x - ε)`, estimate `ε̂ = x`,
//! and compare the empirical generalized error with the closed form.
//!
//! # Random streams
//!
//! Every random stream is a `ChaCha8Rng` seeded with
//! `seed_from_u64(master_seed)` and then moved to a stream number with
//! `set_stream`:
//!
//! * trial chunk `c` (trials `c·CHUNK .. (c+1)·CHUNK`) uses stream `c`;
//! * bootstrap resample `b` uses stream `BOOTSTRAP_STREAM_BASE + b`.
//!
//! Chunks and resamples are evaluated in parallel but collected and summed in
//! index order, so a report depends only on the plan, never on the number of
//! worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{mean_error_closed, MeasureOrder};
use crate::probe::ProbeDistribution;

/// Trials per random stream.
pub const CHUNK: usize = 1 << 16;
/// First stream number used by bootstrap resamples.
pub const BOOTSTRAP_STREAM_BASE: u64 = 1 << 63;
pub const MIN_BOOTSTRAP_RESAMPLES: usize = 100;
/// Two-sided coverage of the bootstrap interval.
pub const CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPlan {
    pub distribution: ProbeDistribution,
    pub true_shift: f64,
    pub order: MeasureOrder,
    pub trials: usize,
    pub master_seed: u64,
    pub bootstrap_resamples: usize,
}

impl TrialPlan {
    pub fn new(
        distribution: ProbeDistribution,
        true_shift: f64,
        order: MeasureOrder,
        trials: usize,
        master_seed: u64,
        bootstrap_resamples: usize,
    ) -> Result<Self> {
        let plan = Self {
            distribution,
            true_shift,
            order,
            trials,
            master_seed,
            bootstrap_resamples,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.bootstrap_resamples < MIN_BOOTSTRAP_RESAMPLES {
            return Err(Error::InvalidParameter(format!(
                "bootstrap_resamples must be at least {MIN_BOOTSTRAP_RESAMPLES}, got {}",
                self.bootstrap_resamples
            )));
        }
        if !self.true_shift.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "true shift must be finite, got {}",
                self.true_shift
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trials: usize,
    pub seed: u64,
    pub true_shift: f64,
    pub q: f64,
    pub empirical_mean: f64,
    pub mean_std_error: f64,
    /// `(mean |x - ε|^{1/q})^q`
    pub empirical_generalized_error: f64,
    pub generalized_error_ci_low: f64,
    pub generalized_error_ci_high: f64,
    pub bootstrap_resamples: usize,
    pub predicted_mean_error: f64,
    /// Largest `|x - ε|` seen; large values relative to the error flag slow
    /// convergence of high fractional moments.
    pub max_abs_deviation: f64,
}

impl TrialReport {
    pub fn ci_contains(&self, value: f64) -> bool {
        self.generalized_error_ci_low <= value && value <= self.generalized_error_ci_high
    }

    pub fn unbiased(&self) -> bool {
        (self.empirical_mean - self.true_shift).abs() <= 3.0 * self.mean_std_error
    }
}

/// Point statistics of one simulated run, without the bootstrap interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub empirical_mean: f64,
    pub mean_std_error: f64,
    pub empirical_generalized_error: f64,
    pub max_abs_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnbiasednessReport {
    pub bias: f64,
    pub std_error: f64,
    pub pass: bool,
}

/// Deterministic random stream `stream` under `master_seed`.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Single-shot outcomes `x_i` of the plan, in trial order.
pub fn draw_outcomes(plan: &TrialPlan) -> Result<Vec<f64>> {
    plan.validate()?;
    let sampler = plan.distribution.sampler();
    let chunks = plan.trials.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(plan.trials - c * CHUNK);
            let mut rng = stream_rng(plan.master_seed, c as u64);
            (0..len).map(|_| plan.true_shift + sampler.sample(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

struct Moments {
    summary: TrialSummary,
    powered: Vec<f64>,
}

fn moments(plan: &TrialPlan, outcomes: &[f64]) -> Moments {
    let n = outcomes.len() as f64;
    let inv_q = 1.0 / plan.order.q();
    let mean = outcomes.iter().sum::<f64>() / n;
    let var = if outcomes.len() > 1 {
        outcomes.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mut max_abs_deviation: f64 = 0.0;
    let powered: Vec<f64> = outcomes
        .iter()
        .map(|x| {
            let dev = (x - plan.true_shift).abs();
            max_abs_deviation = max_abs_deviation.max(dev);
            dev.powf(inv_q)
        })
        .collect();
    let moment = powered.iter().sum::<f64>() / n;
    Moments {
        summary: TrialSummary {
            trials: outcomes.len(),
            empirical_mean: mean,
            mean_std_error: (var / n).sqrt(),
            empirical_generalized_error: moment.powf(plan.order.q()),
            max_abs_deviation,
        },
        powered,
    }
}

/// Point statistics only; cheaper than [`run_trials`].
pub fn summarize(plan: &TrialPlan) -> Result<TrialSummary> {
    let outcomes = draw_outcomes(plan)?;
    Ok(moments(plan, &outcomes).summary)
}

/// Percentile bootstrap of `(mean v)^q` over the per-trial values `v`.
fn bootstrap_interval(plan: &TrialPlan, powered: &[f64]) -> (f64, f64) {
    let n = powered.len();
    let q = plan.order.q();
    let mut stats: Vec<f64> = (0..plan.bootstrap_resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(plan.master_seed, BOOTSTRAP_STREAM_BASE + b as u64);
            let mut sum = 0.0;
            for _ in 0..n {
                sum += powered[rng.random_range(0..n)];
            }
            (sum / n as f64).powf(q)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - CONFIDENCE);
    (quantile(&stats, tail), quantile(&stats, 1.0 - tail))
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Runs the plan and attaches a 99% percentile-bootstrap interval for the
/// generalized error. The interval is widened, if needed, to contain the
/// point estimate.
pub fn run_trials(plan: &TrialPlan) -> Result<TrialReport> {
    let predicted = mean_error_closed(&plan.distribution, plan.order)?.value;
    let outcomes = draw_outcomes(plan)?;
    let Moments { summary, powered } = moments(plan, &outcomes);
    let (low, high) = bootstrap_interval(plan, &powered);
    let point = summary.empirical_generalized_error;
    Ok(TrialReport {
        trials: summary.trials,
        seed: plan.master_seed,
        true_shift: plan.true_shift,
        q: plan.order.q(),
        empirical_mean: summary.empirical_mean,
        mean_std_error: summary.mean_std_error,
        empirical_generalized_error: point,
        generalized_error_ci_low: low.min(point),
        generalized_error_ci_high: high.max(point),
        bootstrap_resamples: plan.bootstrap_resamples,
        predicted_mean_error: predicted,
        max_abs_deviation: summary.max_abs_deviation,
    })
}

/// Checks `|mean(x) - ε| <= 3·SE` for the estimator `ε̂ = x`.
pub fn unbiasedness_report(plan: &TrialPlan) -> Result<UnbiasednessReport> {
    let s = summarize(plan)?;
    let bias = s.empirical_mean - plan.true_shift;
    Ok(UnbiasednessReport {
        bias,
        std_error: s.mean_std_error,
        pass: bias.abs() <= 3.0 * s.mean_std_error,
    })
}
