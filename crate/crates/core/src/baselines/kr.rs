use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::banded::SymBand;
use crate::spline::{basis_col, normalization_col, truncated_power_dd, validate_sw};
use crate::{Error, KnotVector, Result, Signal, SplineModel};

pub const DEFAULT_KR_CAP: usize = 512;

/// Knot-reduction run: surviving knots, final fit and RSS history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrTrace {
    pub knots: KnotVector,
    pub model: SplineModel,
    /// Global RSS of the initial fit and after each removal.
    pub rss: Vec<f64>,
    /// Removed knot positions, in removal order.
    pub removed: Vec<f64>,
}

struct Fit {
    coeffs: Vec<f64>,
    fitted: Vec<f64>,
    rss: f64,
}

fn global_fit(knots: &KnotVector, xs: &[f64], f: &[f64]) -> Result<Fit> {
    let l = knots.degree();
    let dim = knots.dim();
    let mut gram = SymBand::zeros(dim, l);
    let mut rhs = vec![0.0; dim];
    let mut vals = vec![0.0; l + 1];
    let mut spans = Vec::with_capacity(xs.len());
    for (&x, &fi) in xs.iter().zip(f) {
        let s = knots.span_of(x);
        for (k, c) in (s - l..=s).enumerate() {
            vals[k] = basis_col(knots, c, x) * normalization_col(knots, c);
        }
        for (k, c) in (s - l..=s).enumerate() {
            rhs[c] += vals[k] * fi;
            for (k2, c2) in (s - l..=c).enumerate() {
                gram.add(c, c2, vals[k] * vals[k2]);
            }
        }
        spans.push((s, vals.clone()));
    }
    let coeffs = gram
        .solve(&rhs)
        .ok_or_else(|| Error::Infeasible("normal equations are not positive definite".into()))?;
    let fitted: Vec<f64> = spans
        .iter()
        .map(|(s, v)| (s - l..=*s).zip(v).map(|(c, b)| coeffs[c] * b).sum())
        .collect();
    let rss = fitted.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(Fit { coeffs, fitted, rss })
}

fn normalized_from_nodes(nodes: &[f64], x: f64, l: usize, b: f64) -> f64 {
    let (lo, hi) = (nodes[0], nodes[l + 1]);
    if x < lo || x > hi {
        return 0.0;
    }
    let sign = if (l + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (hi - lo) * truncated_power_dd(nodes, x, l, x >= b).unwrap_or(0.0)
}

/// Increase in squared error over the affected window when interior knot
/// `j` is removed and only the `ℓ + 1` spanning basis functions are refitted.
fn removal_cost(knots: &KnotVector, fit: &Fit, xs: &[f64], f: &[f64], j: usize) -> f64 {
    let l = knots.degree();
    let full = knots.full();
    let p = j + 1 + l;
    let (lo, hi) = (full[p - l - 1], full[p + l + 1]);
    let start = xs.partition_point(|&x| x < lo);
    let end = xs.partition_point(|&x| x <= hi);
    if start >= end {
        return 0.0;
    }
    let mut nodes: Vec<f64> = full[p - l - 1..=p + l + 1].to_vec();
    nodes.remove(l + 1);
    let rows = end - start;
    let mut a = DMatrix::zeros(rows, l + 1);
    let mut y = DVector::zeros(rows);
    let mut old_sse = 0.0;
    for (r, i) in (start..end).enumerate() {
        let x = xs[i];
        let old_aff: f64 = (p - l - 1..=p)
            .map(|c| fit.coeffs[c] * basis_col(knots, c, x) * normalization_col(knots, c))
            .sum();
        y[r] = f[i] - (fit.fitted[i] - old_aff);
        old_sse += (f[i] - fit.fitted[i]).powi(2);
        for q in 0..=l {
            a[(r, q)] = normalized_from_nodes(&nodes[q..=q + l + 1], x, l, knots.b());
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let c = match svd.solve(&y, 1e-12 * smax.max(f64::MIN_POSITIVE)) {
        Ok(c) => c,
        Err(_) => return f64::INFINITY,
    };
    let new_sse = (&y - &a * c).norm_squared();
    new_sse - old_sse
}

fn initial_interior(xs: &[f64], degree: usize, cap: usize) -> Vec<f64> {
    let n = xs.len();
    let left = degree.saturating_sub(1).div_ceil(2);
    let right = degree.saturating_sub(1) / 2;
    if n < 2 + left + right {
        return Vec::new();
    }
    let cand = &xs[1 + left..n - 1 - right];
    if cand.len() <= cap {
        return cand.to_vec();
    }
    if cap == 0 {
        return Vec::new();
    }
    if cap == 1 {
        return vec![cand[cand.len() / 2]];
    }
    (0..cap)
        .map(|i| {
            let k = (i as f64 * (cand.len() - 1) as f64 / (cap - 1) as f64).round() as usize;
            cand[k]
        })
        .collect()
}

/// Greedy knot removal from a dense initial set down to `target` knots
/// (boundaries included). Initial interior knots sit on interior samples,
/// trimmed near the ends so the basis never exceeds `N` functions and
/// subsampled to at most `cap`.
pub fn knot_reduction_trace(sig: &Signal, degree: usize, target: usize, cap: usize) -> Result<KrTrace> {
    if degree == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if target < 2 || target > sig.len() {
        return Err(Error::Infeasible(format!(
            "target of {target} knots outside [2, {}]",
            sig.len()
        )));
    }
    let xs = sig.x();
    let f = sig.f();
    let mut interior = initial_interior(xs, degree, cap);
    let mut knots = KnotVector::new(degree, sig.a(), sig.b(), interior.clone())?;
    let sw = validate_sw(&knots, xs);
    if !sw.is_ok() {
        return Err(Error::SchoenbergWhitney(sw.violations));
    }
    let mut fit = global_fit(&knots, xs, f)?;
    let mut rss = vec![fit.rss];
    let mut removed = Vec::new();
    let mut costs: Vec<f64> = (0..interior.len())
        .into_par_iter()
        .map(|j| removal_cost(&knots, &fit, xs, f, j))
        .collect();
    while interior.len() + 2 > target {
        let j = costs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .map(|(j, _)| j)
            .expect("interior knots remain");
        removed.push(interior.remove(j));
        costs.remove(j);
        knots = knots.with_interior(interior.clone())?;
        fit = global_fit(&knots, xs, f)?;
        rss.push(fit.rss);
        let lo = j.saturating_sub(degree + 2);
        let hi = (j + degree + 2).min(interior.len());
        let fresh: Vec<f64> = (lo..hi)
            .into_par_iter()
            .map(|k| removal_cost(&knots, &fit, xs, f, k))
            .collect();
        costs[lo..hi].copy_from_slice(&fresh);
    }
    let model = SplineModel::from_normalized(knots.clone(), &fit.coeffs)?;
    Ok(KrTrace {
        knots,
        model,
        rss,
        removed,
    })
}

/// [`knot_reduction_trace`] with the default cap; returns the surviving knots.
pub fn knot_reduction(sig: &Signal, degree: usize, target: usize) -> Result<KnotVector> {
    knot_reduction_trace(sig, degree, target, DEFAULT_KR_CAP).map(|t| t.knots)
}
