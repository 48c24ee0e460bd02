use thiserror::Error;

use crate::numerics::QuadratureResult;

/// Errors produced by the numerical routines and the measure evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the operation is defined.
    #[error("{what} is outside its domain: {detail}")]
    Domain { what: &'static str, detail: String },

    /// The integrand returned NaN or an infinity at an interior node.
    #[error("integrand returned {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    /// Quadrature exhausted its evaluation budget before meeting tolerance.
    #[error(
        "quadrature did not converge: estimate {} with error {} after {} evaluations",
        .0.value, .0.abs_error_estimate, .0.evaluations
    )]
    NoConvergence(QuadratureResult),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
