//! Free-knot B-spline least-squares fitting.
//!
//! The crate is organised bottom-up:
//!
//! * [`spline`] evaluates B-splines in divided-difference form, their
//!   derivatives with respect to the knots, and assembles sampled design
//!   matrices together with their economy SVD.
//! * [`foba`] predicts knot positions greedily from first-order
//!   (piecewise-constant) approximations in the ℓ1, ℓ2 and ℓ∞ norms.
//! * [`varpro`] refines interior knots with a variable-projection
//!   Levenberg–Marquardt iteration.
//! * [`metrics`] holds the error measures, compression ratio, synthetic test
//!   functions and synthetic ECG generator.
//! * [`baselines`] implements knot reduction and uniform/random initialised
//!   refinement for comparison.
//! * [`pipeline`] ties everything into the predict → refine → evaluate
//!   compression workflow with file ingestion and report emission.

// `!(x > 0.0)` is used on purpose so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod foba;
pub mod metrics;
pub mod pipeline;
pub mod signal;
pub mod spline;
pub mod varpro;

pub use error::{Error, ErrorKind, Result};
pub use foba::{knot_pred, Norm};
pub use metrics::{compression_ratio, error_report, ErrorReport};
pub use varpro::{vp_optimize, FitReport, JacobianMode, VpOptions};
pub use signal::Signal;
pub use spline::{build_design, DesignMatrixBundle, KnotVector, SplineModel};

