//! Knot prediction from first-order (piecewise-constant) B-spline
//! approximations.
//!
//! Candidate knots live on the sample grid. Each span `[t_q, t_{q+1})` keeps
//! its best single split; the greedy loop inserts the best candidate, then
//! re-optimizes only the two spans it created.

mod objective;
mod predict;
mod tables;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use objective::{
    best_split, e2_gain, e2_objective, ep_objective, first_order_coeffs, span_error, Span, Split,
};
pub use predict::{
    estimate_knot_count, foba_error_curve, knot_pred, knot_pred_trace, CandidateSet, ErrorCurve,
    KnotPrediction,
};
pub use tables::PrefixTables;

/// Approximation norm `ℓ_p`, `p ∈ {1, 2, ∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::Linf];
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(Norm::L1),
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" | "l_inf" => Ok(Norm::Linf),
            other => Err(crate::Error::Config(format!("unknown norm '{other}'"))),
        }
    }
}
