//! Generalized uncertainty measures for shift estimation with exponential
//! power probes.
//!
//! The crate evaluates a Rényi–Tsallis family of quantities indexed by an
//! order `q > 0`:
//!
//! | quantity | definition |
//! |----------|------------|
//! | distance `D_q` | `½ ∫ |P^q(x-ε) - P^q(x)|^{1/q} dx` |
//! | Fisher information `F_q` | `∫ P |d ln P/dx|^{1/q} dx` |
//! | sensitivity `ε_min` | `F_q^{-q}` |
//! | posterior width | `[∫ P^q dx]^{1/(1-q)}` |
//! | mean error `Δε_q` | `[∫ P(x-ε) |x-ε|^{1/q} dx]^q` |
//!
//! Every quantity with a closed form also has an independent quadrature
//! evaluator, so each formula can be checked against its defining integral.
//! The probe densities are `P(x) ∝ exp(-2|x/γ|^α)`, optionally normalized to a
//! fixed mean kinetic energy `⟨p²⟩` of the real wave function `√P`.

pub mod error;
pub mod estimation;
pub mod measures;
pub mod numerics;
pub mod probe;

pub use error::{Error, Result};
pub use estimation::{
    run_trials, unbiasedness_report, TrialPlan, TrialReport, TrialSummary, UnbiasednessReport,
};
pub use measures::{MeasureOrder, MeasureValue, Method, Quantity, ShiftSignal};
pub use numerics::{integrate_half_line, integrate_real_line, log_gamma, QuadratureResult, QuadratureSpec};
pub use probe::{EnergyBudget, ProbeDistribution};
