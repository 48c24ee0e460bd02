//! Generalized distance, Fisher information, sensitivity, posterior width and
//! mean estimation error for a probe shifted by a signal `ε`.
//!
//! Closed forms are evaluated in log space from gamma-function ratios; every
//! one has a quadrature counterpart that integrates the defining expression
//! directly and never touches those ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_real_line, log_gamma, QuadratureResult, QuadratureSpec};
use crate::probe::ProbeDistribution;

const LN_2: f64 = std::f64::consts::LN_2;

/// Positive order `q` selecting a member of each measure family.
/// `q = 1/2` gives the Hellinger distance and the classical Fisher information.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MeasureOrder(f64);

impl MeasureOrder {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::domain("order q", format!("{q} must be finite and > 0")));
        }
        Ok(Self(q))
    }

    pub fn q(self) -> f64 {
        self.0
    }
}

/// Shift `ε` applied to the probe, `P(x) -> P(x - ε)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ShiftSignal(pub f64);

impl ShiftSignal {
    pub fn epsilon(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    Dq,
    Fq,
    EpsMin,
    PosteriorWidth,
    MeanError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub quantity: Quantity,
    pub value: f64,
    pub method: Method,
    pub quad_detail: Option<QuadratureResult>,
}

impl MeasureValue {
    fn closed(quantity: Quantity, value: f64) -> Self {
        Self {
            quantity,
            value,
            method: Method::ClosedForm,
            quad_detail: None,
        }
    }

    fn quadrature(quantity: Quantity, value: f64, detail: QuadratureResult) -> Self {
        Self {
            quantity,
            value,
            method: Method::Quadrature,
            quad_detail: Some(detail),
        }
    }
}

/// Gamma-function argument in the closed form of `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherGammaArgument {
    /// `(α + q - 1)/(α q)`, which follows from `E|x|^s = γ^s 2^{-s/α} Γ((s+1)/α)/Γ(1/α)`
    /// with `s = (α - 1)/q`.
    Resolved,
    /// `(α + q - 1)/α`; disagrees with the defining integral whenever `q ≠ 1`.
    Unscaled,
}

impl FisherGammaArgument {
    pub fn evaluate(self, alpha: f64, q: f64) -> f64 {
        match self {
            FisherGammaArgument::Resolved => (alpha + q - 1.0) / (alpha * q),
            FisherGammaArgument::Unscaled => (alpha + q - 1.0) / alpha,
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            FisherGammaArgument::Resolved => "(alpha+q-1)/(alpha*q)",
            FisherGammaArgument::Unscaled => "(alpha+q-1)/alpha",
        }
    }
}

fn converged(result: QuadratureResult) -> Result<QuadratureResult> {
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NoConvergence(result))
    }
}

/// Relative-only tolerance for integrals whose magnitude spans many decades
/// (distances at tiny shifts).
fn relative_spec() -> QuadratureSpec {
    let d = QuadratureSpec::default();
    QuadratureSpec::new(f64::MIN_POSITIVE, d.rel_tol(), d.max_evaluations())
        .expect("valid tolerances")
}

/// `½ ∫ |P^q(x - a) - P^q(x - b)|^{1/q} dx` by quadrature, split at both
/// peaks and at their midpoint, where the difference changes sign.
pub fn dq_between(
    d: &ProbeDistribution,
    a: ShiftSignal,
    b: ShiftSignal,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    let (a, b) = (a.epsilon(), b.epsilon());
    if a == b {
        let exact = QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            converged: true,
            evaluations: 0,
        };
        return Ok(MeasureValue::quadrature(Quantity::Dq, 0.0, exact));
    }
    let q = order.q();
    let spec = relative_spec().with_split_points([a, b, 0.5 * (a + b)]);
    let result = integrate_real_line(
        |x| {
            let ka = d.kernel(x - a);
            let kb = d.kernel(x - b);
            let (near, far) = if ka <= kb { (ka, kb) } else { (kb, ka) };
            if near.is_infinite() {
                return 0.0;
            }
            // |e^{q ln P_far} - e^{q ln P_near}|^{1/q} = P_near |expm1(q (ln P_far - ln P_near))|^{1/q}
            let gap = (-(q * (far - near))).exp_m1().abs();
            (d.log_norm() - near + gap.ln() / q).exp()
        },
        &spec,
    )?;
    let result = converged(result)?;
    Ok(MeasureValue::quadrature(Quantity::Dq, 0.5 * result.value, scaled(result, 0.5)))
}

fn scaled(r: QuadratureResult, factor: f64) -> QuadratureResult {
    QuadratureResult {
        value: r.value * factor,
        abs_error_estimate: r.abs_error_estimate * factor,
        ..r
    }
}

/// Distance between the probe and its copy shifted by `ε`.
pub fn dq_quadrature(
    d: &ProbeDistribution,
    shift: ShiftSignal,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    dq_between(d, ShiftSignal(0.0), shift, order)
}

/// First-order small-shift form `(q^{1/q}/2) |ε|^{1/q} F_q` with `F_q` from
/// quadrature.
pub fn dq_linearized(
    d: &ProbeDistribution,
    shift: ShiftSignal,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    let q = order.q();
    let fisher = fisher_generalized_quadrature(d, order)?;
    let eps = shift.epsilon().abs();
    let value = if eps == 0.0 {
        0.0
    } else {
        0.5 * (q.ln() / q + eps.ln() / q).exp() * fisher.value
    };
    Ok(MeasureValue {
        quantity: Quantity::Dq,
        value,
        method: Method::Quadrature,
        quad_detail: fisher.quad_detail,
    })
}

fn require_fisher_integrable(alpha: f64, q: f64) -> Result<()> {
    if alpha > 1.0 - q {
        Ok(())
    } else {
        Err(Error::domain(
            "shape alpha",
            format!("F_q needs alpha > 1 - q; got alpha = {alpha}, q = {q}"),
        ))
    }
}

fn require_closed_fisher_domain(alpha: f64, q: f64) -> Result<()> {
    let bound = (1.0 - q).max(0.5);
    if alpha > bound {
        Ok(())
    } else {
        Err(Error::domain(
            "shape alpha",
            format!("closed form needs alpha > max(1 - q, 1/2) = {bound}; got alpha = {alpha}"),
        ))
    }
}

/// `F_q = ∫ P |d ln P/dx|^{1/q} dx` by quadrature.
///
/// The integrand is even, so the half-line is folded in and integrated in the
/// logarithmic coordinate `s = ln x`:
///
/// ```text
/// F_q = 2 ∫_{-∞}^{∞} P(e^s) |score(e^s)|^{1/q} e^s ds
/// ```
///
/// evaluated entirely from `ln P` and `ln |score|`. The integrable
/// `|x|^{(α-1)/q}` singularity at the origin becomes a slowly decaying
/// exponential tail as `s -> -∞`, which stays representable even when
/// `α` is just above `1 - q` and almost all of the mass sits at `x < 1e-300`.
pub fn fisher_generalized_quadrature(
    d: &ProbeDistribution,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    let q = order.q();
    require_fisher_integrable(d.alpha(), q)?;
    // The density falls off around s = ln γ - ln 2 / α.
    let edge = d.gamma_scale().ln() - LN_2 / d.alpha();
    let spec = QuadratureSpec::default().with_split_points([edge]);
    let result = integrate_real_line(
        |s| (d.log_pdf_at_log_abs(s) + d.log_abs_score_at_log_abs(s) / q + s).exp(),
        &spec,
    )?;
    let result = converged(result)?;
    Ok(MeasureValue::quadrature(Quantity::Fq, 2.0 * result.value, scaled(result, 2.0)))
}

/// `ln F_q` from the closed form with the requested gamma argument.
fn log_fisher_closed(d: &ProbeDistribution, q: f64, argument: FisherGammaArgument) -> Result<f64> {
    let a = d.alpha();
    let prefactor = (a.ln() + LN_2 / a - d.gamma_scale().ln()) / q;
    Ok(prefactor + log_gamma(argument.evaluate(a, q))? - log_gamma(1.0 / a)?)
}

/// `F_q = (α 2^{1/α}/γ)^{1/q} Γ((α+q-1)/(αq)) / Γ(1/α)`.
pub fn fisher_generalized_closed(
    d: &ProbeDistribution,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    fisher_closed_with_argument(d, order, FisherGammaArgument::Resolved)
}

/// Closed-form `F_q` with an explicit choice of gamma argument, for comparing
/// candidate formulas against quadrature.
pub fn fisher_closed_with_argument(
    d: &ProbeDistribution,
    order: MeasureOrder,
    argument: FisherGammaArgument,
) -> Result<MeasureValue> {
    let q = order.q();
    require_closed_fisher_domain(d.alpha(), q)?;
    let value = log_fisher_closed(d, q, argument)?.exp();
    Ok(MeasureValue::closed(Quantity::Fq, value))
}

/// Sensitivity `ε_min = F_q^{-q}` (unit detection threshold), closed form.
pub fn epsilon_min(d: &ProbeDistribution, order: MeasureOrder) -> Result<MeasureValue> {
    let q = order.q();
    require_closed_fisher_domain(d.alpha(), q)?;
    let value = (-q * log_fisher_closed(d, q, FisherGammaArgument::Resolved)?).exp();
    Ok(MeasureValue::closed(Quantity::EpsMin, value))
}

/// Sensitivity `F_q^{-q}` with `F_q` from quadrature.
pub fn epsilon_min_quadrature(d: &ProbeDistribution, order: MeasureOrder) -> Result<MeasureValue> {
    let q = order.q();
    require_closed_fisher_domain(d.alpha(), q)?;
    let fisher = fisher_generalized_quadrature(d, order)?;
    Ok(MeasureValue {
        quantity: Quantity::EpsMin,
        value: fisher.value.powf(-q),
        method: Method::Quadrature,
        quad_detail: fisher.quad_detail,
    })
}

fn require_width_order(q: f64) -> Result<()> {
    if q == 1.0 {
        Err(Error::domain("order q", "posterior width is undefined at q = 1"))
    } else {
        Ok(())
    }
}

/// Posterior width `[∫ P^q]^{1/(1-q)} = q^{-1/(α(1-q))} · 2 Γ(1/α) γ / (α 2^{1/α})`.
pub fn posterior_width_closed(d: &ProbeDistribution, order: MeasureOrder) -> Result<MeasureValue> {
    let q = order.q();
    require_width_order(q)?;
    let a = d.alpha();
    let log = -q.ln() / (a * (1.0 - q)) + LN_2 + log_gamma(1.0 / a)? + d.gamma_scale().ln()
        - a.ln()
        - LN_2 / a;
    Ok(MeasureValue::closed(Quantity::PosteriorWidth, log.exp()))
}

/// Posterior width by quadrature of `∫ P^q dx`.
pub fn posterior_width_quadrature(
    d: &ProbeDistribution,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    posterior_width_quadrature_shifted(d, ShiftSignal(0.0), order)
}

/// Posterior width of the shifted density `P(x - ε)`; independent of `ε`.
pub fn posterior_width_quadrature_shifted(
    d: &ProbeDistribution,
    shift: ShiftSignal,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    let q = order.q();
    require_width_order(q)?;
    let eps = shift.epsilon();
    let spec = QuadratureSpec::default().with_split_points([eps]);
    let result = integrate_real_line(|x| (q * d.log_pdf(x - eps)).exp(), &spec)?;
    let result = converged(result)?;
    let value = result.value.powf(1.0 / (1.0 - q));
    Ok(MeasureValue::quadrature(Quantity::PosteriorWidth, value, result))
}

/// Mean estimation error `2^{-1/α} Γ^q((1+q)/(αq)) / Γ^q(1/α) · γ`.
pub fn mean_error_closed(d: &ProbeDistribution, order: MeasureOrder) -> Result<MeasureValue> {
    let q = order.q();
    let a = d.alpha();
    let log = -LN_2 / a + q * (log_gamma((1.0 + q) / (a * q))? - log_gamma(1.0 / a)?)
        + d.gamma_scale().ln();
    Ok(MeasureValue::closed(Quantity::MeanError, log.exp()))
}

/// `[∫ P(x - ε) |x - ε|^{1/q} dx]^q` by quadrature, split at `ε`.
pub fn mean_error_quadrature(
    d: &ProbeDistribution,
    shift: ShiftSignal,
    order: MeasureOrder,
) -> Result<MeasureValue> {
    let q = order.q();
    let eps = shift.epsilon();
    let spec = QuadratureSpec::default().with_split_points([eps]);
    let result = integrate_real_line(
        |x| {
            let y = x - eps;
            if y == 0.0 {
                return 0.0;
            }
            (d.log_pdf(y) + y.abs().ln() / q).exp()
        },
        &spec,
    )?;
    let result = converged(result)?;
    Ok(MeasureValue::quadrature(Quantity::MeanError, result.value.powf(q), result))
}

/// Outcome of checking `T(ε₁,ε₃) <= T(ε₁,ε₂) + T(ε₂,ε₃)` for `T = D_q^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub shifts: [f64; 3],
    /// `T(ε₁, ε₃)`
    pub lhs: f64,
    /// `T(ε₁, ε₂) + T(ε₂, ε₃)`
    pub rhs: f64,
    /// Quadrature uncertainty carried into the comparison.
    pub slack: f64,
    pub violated: bool,
}

pub fn triangle_probe(
    d: &ProbeDistribution,
    order: MeasureOrder,
    shifts: [f64; 3],
) -> Result<TriangleReport> {
    let [e1, e2, e3] = shifts;
    if !(e1 <= e2 && e2 <= e3) || shifts.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "shifts must be finite and ordered, got {shifts:?}"
        )));
    }
    let q = order.q();
    // T = D^q and its propagated error q T (δD / D).
    let leg = |a: f64, b: f64| -> Result<(f64, f64)> {
        let m = dq_between(d, ShiftSignal(a), ShiftSignal(b), order)?;
        if m.value == 0.0 {
            return Ok((0.0, 0.0));
        }
        let t = m.value.powf(q);
        let err = m.quad_detail.map_or(0.0, |r| r.abs_error_estimate);
        Ok((t, q * t * err / m.value))
    };
    let (lhs, e13) = leg(e1, e3)?;
    let (t12, e12) = leg(e1, e2)?;
    let (t23, e23) = leg(e2, e3)?;
    let rhs = t12 + t23;
    let slack = e13 + e12 + e23 + 1e-12 * lhs.max(rhs);
    Ok(TriangleReport {
        shifts,
        lhs,
        rhs,
        slack,
        violated: lhs > rhs + slack,
    })
}
