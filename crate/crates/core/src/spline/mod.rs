//! B-splines in divided-difference form over a clamped knot sequence.
//!
//! Basis functions are indexed as `k = -ℓ ..= n-1` and knots as
//! `t_{-ℓ} ..= t_{n+ℓ}`, where `t_{-ℓ} = … = t_0 = a` and
//! `t_n = … = t_{n+ℓ} = b`. For `ℓ ≥ 1` the basis is the *unnormalized*
//! `B_{ℓ,k} = [t_k, …, t_{k+ℓ+1}](x - ·)_+^ℓ`; the usual normalized basis is
//! `N_{ℓ,k} = C_k · B_{ℓ,k}` with `C_k = (-1)^{ℓ+1}(t_{k+ℓ+1} - t_k)`.
//! Degree zero uses the characteristic functions of `[t_k, t_{k+1})`, with
//! the last span closed at `b`.

mod basis;
mod design;
mod divdiff;
mod knots;
mod model;

pub use basis::{eval_bspline, eval_first_order, eval_knot_derivative, normalization};
pub(crate) use basis::{basis_col, normalization_col};
pub use design::{
    build_design, build_design_with, validate_sw, DerivSlab, DesignMatrixBundle, DesignOptions,
    SparseColumn, SwReport, DEFAULT_RANK_TOL,
};
pub use divdiff::{truncated_power_dd, MAX_DEGREE};
pub use knots::KnotVector;
pub use model::{eval_model, SplineModel};
