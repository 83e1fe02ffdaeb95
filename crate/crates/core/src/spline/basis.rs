use super::divdiff::truncated_power_dd;
use super::knots::KnotVector;
use crate::error::{Error, Result};

fn check_domain(knots: &KnotVector, x: f64) -> Result<()> {
    if knots.contains(x) {
        Ok(())
    } else {
        Err(Error::Domain {
            x,
            a: knots.a(),
            b: knots.b(),
        })
    }
}

/// `χ_[t_k, t_{k+1})(x)` for a degree-zero knot vector, with the last span
/// closed at `b`.
pub fn eval_first_order(knots: &KnotVector, k: isize, x: f64) -> Result<f64> {
    if knots.degree() != 0 {
        return Err(Error::InvalidDegree(knots.degree()));
    }
    let c = knots.column(k)?;
    check_domain(knots, x)?;
    Ok(first_order_col(knots, c, x))
}

#[inline]
fn first_order_col(knots: &KnotVector, c: usize, x: f64) -> f64 {
    let (lo, hi) = knots.support(c);
    let last = c + 1 == knots.dim();
    if (lo <= x && x < hi) || (last && x == hi) {
        1.0
    } else {
        0.0
    }
}

/// Value of column `c` at `x`, no bounds checks.
#[inline]
pub(crate) fn basis_col(knots: &KnotVector, c: usize, x: f64) -> f64 {
    let l = knots.degree();
    if l == 0 {
        return first_order_col(knots, c, x);
    }
    let (lo, hi) = knots.support(c);
    if x < lo || x > hi {
        return 0.0;
    }
    let nodes = &knots.full()[c..=c + l + 1];
    // Nodes come from a validated vector, multiplicity never exceeds ℓ + 1.
    truncated_power_dd(nodes, x, l, x >= knots.b()).unwrap_or(0.0)
}

/// `∂B_{ℓ,c-ℓ}/∂t` for the knot stored at position `pos` of the full vector.
#[inline]
pub(crate) fn knot_derivative_col(
    knots: &KnotVector,
    c: usize,
    pos: usize,
    x: f64,
) -> Result<f64> {
    let l = knots.degree();
    if pos < c || pos > c + l + 1 {
        return Ok(0.0);
    }
    let (lo, hi) = knots.support(c);
    if x < lo || x > hi {
        return Ok(0.0);
    }
    let full = knots.full();
    let mut nodes = [0.0f64; super::divdiff::MAX_DEGREE + 3];
    let m = l + 2;
    nodes[..m].copy_from_slice(&full[c..c + m]);
    nodes[m] = full[pos];
    truncated_power_dd(&nodes[..=m], x, l, x >= knots.b())
}

/// `B_{ℓ,k}(τ_n; x)` in divided-difference form without the scaling factor.
pub fn eval_bspline(knots: &KnotVector, k: isize, x: f64) -> Result<f64> {
    let c = knots.column(k)?;
    check_domain(knots, x)?;
    Ok(basis_col(knots, c, x))
}

/// Partial derivative of `B_{ℓ,j}` with respect to the knot `t_k`: the
/// divided difference with `t_k` doubled when `j ≤ k ≤ j + ℓ + 1`, zero
/// otherwise.
pub fn eval_knot_derivative(knots: &KnotVector, j: isize, k: isize, x: f64) -> Result<f64> {
    if knots.degree() == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let c = knots.column(j)?;
    knots.t(k)?;
    check_domain(knots, x)?;
    let pos = (k + knots.degree() as isize) as usize;
    knot_derivative_col(knots, c, pos, x)
}

/// Scaling `C_k = (-1)^{ℓ+1}(t_{k+ℓ+1} - t_k)` turning `B_{ℓ,k}` into the
/// normalized `N_{ℓ,k}`. Degree zero is already normalized, `C_k = 1`.
pub fn normalization(knots: &KnotVector, k: isize) -> Result<f64> {
    let c = knots.column(k)?;
    Ok(normalization_col(knots, c))
}

#[inline]
pub(crate) fn normalization_col(knots: &KnotVector, c: usize) -> f64 {
    let l = knots.degree();
    if l == 0 {
        return 1.0;
    }
    let (lo, hi) = knots.support(c);
    let sign = if (l + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (hi - lo)
}
