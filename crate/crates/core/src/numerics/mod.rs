//! Special functions and quadrature over unbounded domains.

mod gamma;
mod quadrature;

pub use gamma::log_gamma;
pub use quadrature::{integrate_half_line, integrate_real_line, QuadratureResult, QuadratureSpec};
