//! Monte Carlo run of the single-shot estimator `ε̂ = x`, reported as JSON
//! with the field names of [`rtmetro::TrialReport`].

use clap::Args;
use rtmetro::{run_trials, EnergyBudget, MeasureOrder, ProbeDistribution, TrialPlan, TrialReport};

use crate::config::ConfigFile;
use crate::{write_output, CliError, CommonArgs, Outcome};

pub const DEFAULT_Q: f64 = 0.5;
pub const DEFAULT_TRIALS: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Mean energy fixing the probe width.
    #[arg(long, conflicts_with = "gamma")]
    pub energy: Option<f64>,
    /// Probe width, as an alternative to `--energy`.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// True shift applied to the probe.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap resamples for the confidence interval.
    #[arg(long)]
    pub resamples: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const CONFIG_KEYS: &[&str] = &[
    "alpha", "energy", "gamma", "q", "eps", "trials", "seed", "resamples", "out",
];

impl SimulateArgs {
    pub fn plan(&self, file: &ConfigFile) -> Result<TrialPlan, CliError> {
        let alpha = file
            .or(self.alpha, "alpha")?
            .ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
        let energy = file.or(self.energy, "energy")?;
        let gamma = file.or(self.gamma, "gamma")?;
        let distribution = match (energy, gamma) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("--energy and --gamma are mutually exclusive".into()))
            }
            (Some(e), None) => ProbeDistribution::from_shape_energy(alpha, EnergyBudget::new(e)?)?,
            (None, Some(g)) => ProbeDistribution::from_shape_scale(alpha, g)?,
            (None, None) => ProbeDistribution::from_shape_energy(alpha, EnergyBudget::new(1.0)?)?,
        };
        let q = file.or(self.q, "q")?.unwrap_or(DEFAULT_Q);
        let plan = TrialPlan::new(
            distribution,
            file.or(self.eps, "eps")?.unwrap_or(0.0),
            MeasureOrder::new(q)?,
            file.or(self.trials, "trials")?.unwrap_or(DEFAULT_TRIALS),
            file.or(self.seed, "seed")?.unwrap_or(DEFAULT_SEED),
            file.or(self.resamples, "resamples")?.unwrap_or(DEFAULT_RESAMPLES),
        )?;
        Ok(plan)
    }
}

/// The run passes when the mean is within 3 standard errors of the shift and
/// the bootstrap interval contains the closed-form error.
pub fn report_passes(r: &TrialReport) -> bool {
    r.unbiased() && r.ci_contains(r.predicted_mean_error)
}

pub fn to_json(r: &TrialReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn run(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let file = ConfigFile::load(args.common.config.as_deref(), CONFIG_KEYS)?;
    let plan = args.plan(&file)?;
    let out = file.or(args.common.out.clone(), "out")?;
    let report = run_trials(&plan)?;
    write_output(out.as_deref(), &to_json(&report))?;
    Ok(Outcome::from_pass(report_passes(&report)))
}
