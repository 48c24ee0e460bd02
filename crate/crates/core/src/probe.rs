//! Exponential power probe densities `P(x) = C exp(-2|x/γ|^α)`.
//!
//! `α = 1` is the two-sided exponential, `α = 2` the Gaussian with standard
//! deviation `γ/2`, and large `α` approaches a box of half-width `γ/2^{1/α}`.
//! All evaluation goes through logarithms so shapes up to `α ≈ 10^3` stay
//! finite.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::numerics::{integrate_real_line, log_gamma, QuadratureResult, QuadratureSpec};

const LN_2: f64 = std::f64::consts::LN_2;

/// Mean kinetic energy `⟨p²⟩` held fixed when comparing probes.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EnergyBudget(f64);

impl EnergyBudget {
    pub fn new(mean_energy: f64) -> Result<Self> {
        if !(mean_energy > 0.0) || !mean_energy.is_finite() {
            return Err(Error::domain("mean energy", format!("{mean_energy} must be finite and > 0")));
        }
        Ok(Self(mean_energy))
    }

    pub fn mean_energy(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeDistribution {
    alpha: f64,
    gamma_scale: f64,
    norm_const: f64,
    log_norm: f64,
}

impl ProbeDistribution {
    /// Builds the density with shape `alpha` and width `gamma_scale`.
    pub fn from_shape_scale(alpha: f64, gamma_scale: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain("shape alpha", format!("{alpha} must be finite and > 0")));
        }
        if !(gamma_scale > 0.0) || !gamma_scale.is_finite() {
            return Err(Error::domain("scale gamma", format!("{gamma_scale} must be finite and > 0")));
        }
        // ln[α 2^{1/α} / (2 γ Γ(1/α))]
        let log_norm =
            alpha.ln() + LN_2 / alpha - LN_2 - gamma_scale.ln() - log_gamma(1.0 / alpha)?;
        Ok(Self {
            alpha,
            gamma_scale,
            norm_const: log_norm.exp(),
            log_norm,
        })
    }

    /// Builds the density whose real wave function `√P` has `⟨p²⟩` equal to
    /// the budget. Requires `alpha > 1/2`; below that `⟨p²⟩` diverges.
    pub fn from_shape_energy(alpha: f64, budget: EnergyBudget) -> Result<Self> {
        let gamma_scale = scale_for_energy(alpha, budget)?;
        Self::from_shape_scale(alpha, gamma_scale)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_scale(&self) -> f64 {
        self.gamma_scale
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// `2|x/γ|^α`, the negated exponent of the density.
    pub fn kernel(&self, x: f64) -> f64 {
        2.0 * (x.abs() / self.gamma_scale).powf(self.alpha)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.log_norm - self.kernel(x)
    }

    /// `ln P` as a function of `s = ln|x|`.
    pub fn log_pdf_at_log_abs(&self, s: f64) -> f64 {
        self.log_norm - 2.0 * (self.alpha * (s - self.gamma_scale.ln())).exp()
    }

    /// `d ln P / dx = -sign(x) 2α |x|^{α-1} / γ^α`.
    ///
    /// At `x = 0` the derivative is 0 for `alpha > 1` and undefined otherwise.
    pub fn score(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            if self.alpha > 1.0 {
                return Ok(0.0);
            }
            return Err(Error::domain(
                "score argument",
                format!("x = 0 is a cusp of the density for alpha = {}", self.alpha),
            ));
        }
        Ok(self.score_unchecked(x))
    }

    pub(crate) fn score_unchecked(&self, x: f64) -> f64 {
        let magnitude = (self.log_abs_score_at_log_abs(x.abs().ln())).exp();
        -x.signum() * magnitude
    }

    /// `ln |d ln P/dx|` as a function of `s = ln|x|`.
    pub fn log_abs_score_at_log_abs(&self, s: f64) -> f64 {
        (2.0 * self.alpha).ln() - self.alpha * self.gamma_scale.ln() + (self.alpha - 1.0) * s
    }

    /// Analytic `⟨p²⟩ = α² 2^{2/α} Γ(2 - 1/α) / (4 γ² Γ(1/α))`.
    pub fn mean_energy(&self) -> Result<f64> {
        require_energy_domain(self.alpha)?;
        let a = self.alpha;
        let log = 2.0 * a.ln() + 2.0 * LN_2 / a + log_gamma(2.0 - 1.0 / a)?
            - 2.0 * LN_2
            - 2.0 * self.gamma_scale.ln()
            - log_gamma(1.0 / a)?;
        Ok(log.exp())
    }

    /// `⟨p²⟩ = ¼ ∫ P (d ln P/dx)² dx` by quadrature, split at the origin.
    pub fn mean_energy_quadrature(&self) -> Result<QuadratureResult> {
        require_energy_domain(self.alpha)?;
        let spec = QuadratureSpec::default().with_split_points([0.0]);
        let result = integrate_real_line(
            |x| {
                if x == 0.0 {
                    return 0.0;
                }
                let s = x.abs().ln();
                (self.log_pdf(x) + 2.0 * self.log_abs_score_at_log_abs(s)).exp()
            },
            &spec,
        )?;
        let result = QuadratureResult {
            value: 0.25 * result.value,
            abs_error_estimate: 0.25 * result.abs_error_estimate,
            ..result
        };
        if !result.converged {
            return Err(Error::NoConvergence(result));
        }
        Ok(result)
    }

    /// Sampler drawing exactly from this density.
    pub fn sampler(&self) -> ProbeSampler {
        ProbeSampler::new(self)
    }

    /// `n` independent draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let sampler = self.sampler();
        (0..n).map(|_| sampler.sample(rng)).collect()
    }
}

fn require_energy_domain(alpha: f64) -> Result<()> {
    if alpha > 0.5 {
        Ok(())
    } else {
        Err(Error::domain(
            "shape alpha",
            format!("{alpha}: the mean energy is finite only for alpha > 1/2"),
        ))
    }
}

/// `γ = α 2^{1/α} / (2√E) · √(Γ(2 - 1/α) / Γ(1/α))`.
pub fn scale_for_energy(alpha: f64, budget: EnergyBudget) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::domain("shape alpha", format!("{alpha} must be finite")));
    }
    require_energy_domain(alpha)?;
    let log = alpha.ln() + LN_2 / alpha - LN_2 - 0.5 * budget.mean_energy().ln()
        + 0.5 * (log_gamma(2.0 - 1.0 / alpha)? - log_gamma(1.0 / alpha)?);
    Ok(log.exp())
}

/// Exact sampler: with `g ~ Gamma(1/α, 1)` and a fair sign `s`,
/// `x = s γ (g/2)^{1/α}` has density `P`, because `u = 2|x/γ|^α` then has
/// density `u^{1/α - 1} e^{-u} / Γ(1/α)`.
///
/// For shape `1/α < 1` the gamma variate is drawn as `G·U^{α}` with
/// `G ~ Gamma(1 + 1/α)` and `U` uniform, entirely in log space, so very
/// large `α` cannot underflow `g` to zero.
#[derive(Debug, Clone, Copy)]
pub struct ProbeSampler {
    gamma: Gamma<f64>,
    boosted: bool,
    alpha: f64,
    ln_scale: f64,
}

impl ProbeSampler {
    fn new(d: &ProbeDistribution) -> Self {
        let shape = 1.0 / d.alpha;
        let boosted = shape < 1.0;
        let gamma_shape = if boosted { shape + 1.0 } else { shape };
        Self {
            gamma: Gamma::new(gamma_shape, 1.0).expect("positive finite shape"),
            boosted,
            alpha: d.alpha,
            ln_scale: d.gamma_scale.ln(),
        }
    }
}

impl Distribution<f64> for ProbeSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut ln_g = self.gamma.sample(rng).ln();
        if self.boosted {
            // U in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            ln_g += self.alpha * u.ln();
        }
        let magnitude = (self.ln_scale + (ln_g - LN_2) / self.alpha).exp();
        if rng.random::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    }
}
