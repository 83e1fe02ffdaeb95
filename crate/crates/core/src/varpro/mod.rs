//! Variable-projection refinement of free interior knots.
//!
//! The coefficients are eliminated through the pseudoinverse, leaving
//! `r2(α) = ‖P⊥_Φ(α) f‖²` as a function of the interior knots only. Steps are
//! Levenberg–Marquardt on the projected residual with either the full
//! Jacobian `−(K + L)` or the Kaufman approximation `−K`.

mod convergence;
mod optimize;
mod solve;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use convergence::{estimate_convergence, estimate_convergence_from_steps, ConvergenceEstimate};
pub use optimize::{
    lethargy_probe, vp_objective, vp_optimize, vp_step, FitReport, JacobianNorms, VpOptions,
    VpState, VpStatus,
};
pub use solve::{jacobian_terms, linear_solve, vp_gradient, vp_jacobian, JacobianTerms, LinearSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianMode {
    #[default]
    Full,
    Kaufman,
}

impl fmt::Display for JacobianMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JacobianMode::Full => "full",
            JacobianMode::Kaufman => "kaufman",
        })
    }
}

impl FromStr for JacobianMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(JacobianMode::Full),
            "kaufman" => Ok(JacobianMode::Kaufman),
            other => Err(crate::Error::Config(format!("unknown jacobian mode '{other}'"))),
        }
    }
}
