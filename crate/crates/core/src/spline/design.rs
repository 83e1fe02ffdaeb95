use nalgebra::{DMatrix, DVector};

use super::basis::{basis_col, knot_derivative_col};
use super::knots::KnotVector;
use crate::error::{Error, Result};
use crate::signal::Signal;

/// Singular values below `DEFAULT_RANK_TOL · σ_max` are dropped.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// A matrix column stored as a contiguous run of rows `start..start + values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumn {
    pub start: usize,
    pub values: Vec<f64>,
}

impl SparseColumn {
    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(&v[self.start..self.end()])
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `out += scale * self`
    pub fn axpy(&self, scale: f64, out: &mut [f64]) {
        for (o, v) in out[self.start..self.end()].iter_mut().zip(&self.values) {
            *o += scale * v;
        }
    }
}

/// `D_j = ∂Φ/∂α_j`: the columns of the design matrix touched by one free knot.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivSlab {
    /// Knot index `j` in `1..n`.
    pub knot: usize,
    /// `(column, values)` pairs; every other column of `D_j` is zero.
    pub columns: Vec<(usize, SparseColumn)>,
}

impl DerivSlab {
    /// `D_j c` as a dense vector of length `rows`.
    pub fn mul_vec(&self, coeffs: &[f64], rows: usize) -> Vec<f64> {
        let mut out = vec![0.0; rows];
        for (c, col) in &self.columns {
            col.axpy(coeffs[*c], &mut out);
        }
        out
    }

    /// `D_jᵀ r` as a dense vector of length `cols`.
    pub fn tr_mul_vec(&self, r: &[f64], cols: usize) -> Vec<f64> {
        let mut out = vec![0.0; cols];
        for (c, col) in &self.columns {
            out[*c] = col.dot(r);
        }
        out
    }

    pub fn to_dense(&self, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(rows, cols);
        for (c, col) in &self.columns {
            for (i, v) in col.values.iter().enumerate() {
                m[(col.start + i, *c)] = *v;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DesignOptions {
    pub rank_tol: f64,
    /// Assemble the knot-derivative slabs (requires degree ≥ 1).
    pub derivatives: bool,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            rank_tol: DEFAULT_RANK_TOL,
            derivatives: true,
        }
    }
}

/// Sampled basis, its economy SVD and the knot-derivative slabs.
#[derive(Debug, Clone)]
pub struct DesignMatrixBundle {
    knots: KnotVector,
    rows: usize,
    columns: Vec<SparseColumn>,
    phi: DMatrix<f64>,
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    v: DMatrix<f64>,
    rank_tol: f64,
    slabs: Vec<DerivSlab>,
}

impl DesignMatrixBundle {
    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[SparseColumn] {
        &self.columns
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    /// Left singular vectors kept after truncation, `rows × rank`.
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Retained singular values in descending order.
    pub fn sigma(&self) -> &DVector<f64> {
        &self.sigma
    }

    /// Right singular vectors kept after truncation, `cols × rank`.
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn deriv_slabs(&self) -> &[DerivSlab] {
        &self.slabs
    }

    /// `P_Φ y = U Uᵀ y`.
    pub fn project(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.u * self.u.tr_mul(y)
    }

    /// `Φ⁺ y = V Σ⁺ Uᵀ y`.
    pub fn pinv_mul(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut z = self.u.tr_mul(y);
        z.component_div_assign(&self.sigma);
        &self.v * z
    }

    /// `(Φ⁺)ᵀ y = U Σ⁺ Vᵀ y` for `y` of length `cols`.
    pub fn pinv_tr_mul(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut z = self.v.tr_mul(y);
        z.component_div_assign(&self.sigma);
        &self.u * z
    }
}

/// Outcome of the Schoenberg–Whitney check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwReport {
    /// Basis indices `k` that could not be matched to a distinct sample.
    pub violations: Vec<isize>,
}

impl SwReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn in_support(knots: &KnotVector, c: usize, x: f64) -> bool {
    let (lo, hi) = knots.support(c);
    if knots.degree() == 0 {
        return (lo <= x && x < hi) || (c + 1 == knots.dim() && x == hi);
    }
    (lo < x && x < hi) || (c == 0 && x == knots.a()) || (c + 1 == knots.dim() && x == knots.b())
}

/// Checks that every basis function can be assigned its own sample inside
/// its support, in increasing order. This interlacing form is what guarantees
/// a full-rank sampled basis; an empty support is always reported.
pub fn validate_sw(knots: &KnotVector, xs: &[f64]) -> SwReport {
    let l = knots.degree() as isize;
    let mut violations = Vec::new();
    let mut p = 0;
    for c in 0..knots.dim() {
        let (_, hi) = knots.support(c);
        while p < xs.len() && xs[p] < hi && !in_support(knots, c, xs[p]) {
            p += 1;
        }
        if p < xs.len() && in_support(knots, c, xs[p]) {
            p += 1;
        } else {
            violations.push(c as isize - l);
        }
    }
    SwReport { violations }
}

fn row_range(xs: &[f64], lo: f64, hi: f64) -> (usize, usize) {
    let start = xs.partition_point(|&x| x < lo);
    let end = xs.partition_point(|&x| x <= hi);
    (start, end.max(start))
}

fn sampled_column(knots: &KnotVector, c: usize, xs: &[f64]) -> SparseColumn {
    let (lo, hi) = knots.support(c);
    let (start, end) = row_range(xs, lo, hi);
    SparseColumn {
        start,
        values: xs[start..end].iter().map(|&x| basis_col(knots, c, x)).collect(),
    }
}

pub fn build_design(knots: &KnotVector, sig: &Signal) -> Result<DesignMatrixBundle> {
    build_design_with(knots, sig.x(), &DesignOptions::default())
}

pub fn build_design_with(
    knots: &KnotVector,
    xs: &[f64],
    opts: &DesignOptions,
) -> Result<DesignMatrixBundle> {
    let report = validate_sw(knots, xs);
    if !report.is_ok() {
        return Err(Error::SchoenbergWhitney(report.violations));
    }
    if let (Some(&x0), Some(&x1)) = (xs.first(), xs.last()) {
        if x0 < knots.a() || x1 > knots.b() {
            let x = if x0 < knots.a() { x0 } else { x1 };
            return Err(Error::Domain {
                x,
                a: knots.a(),
                b: knots.b(),
            });
        }
    }
    let rows = xs.len();
    let dim = knots.dim();
    let columns: Vec<SparseColumn> = (0..dim).map(|c| sampled_column(knots, c, xs)).collect();

    let mut phi = DMatrix::zeros(rows, dim);
    for (c, col) in columns.iter().enumerate() {
        for (i, v) in col.values.iter().enumerate() {
            phi[(col.start + i, c)] = *v;
        }
    }

    let l = knots.degree();
    let mut slabs = Vec::new();
    if opts.derivatives && l >= 1 {
        for j in 1..knots.n() {
            let pos = j + l;
            let mut cols = Vec::with_capacity(l + 2);
            for c in (pos.saturating_sub(l + 1))..=pos.min(dim - 1) {
                let (lo, hi) = knots.support(c);
                let (start, end) = row_range(xs, lo, hi);
                let values = xs[start..end]
                    .iter()
                    .map(|&x| knot_derivative_col(knots, c, pos, x))
                    .collect::<Result<Vec<_>>>()?;
                cols.push((c, SparseColumn { start, values }));
            }
            slabs.push(DerivSlab {
                knot: j,
                columns: cols,
            });
        }
    }

    let svd = phi
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or(Error::SvdFailed)?;
    let u_full = svd.u.ok_or(Error::SvdFailed)?;
    let vt_full = svd.v_t.ok_or(Error::SvdFailed)?;
    let s = svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let mut keep: Vec<usize> = (0..s.len())
        .filter(|&i| s[i] > opts.rank_tol * smax && s[i] > 0.0)
        .collect();
    keep.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let r = keep.len();
    let mut u = DMatrix::zeros(rows, r);
    let mut v = DMatrix::zeros(dim, r);
    let mut sigma = DVector::zeros(r);
    for (dst, &src) in keep.iter().enumerate() {
        u.set_column(dst, &u_full.column(src));
        v.set_column(dst, &vt_full.row(src).transpose());
        sigma[dst] = s[src];
    }

    Ok(DesignMatrixBundle {
        knots: knots.clone(),
        rows,
        columns,
        phi,
        u,
        sigma,
        v,
        rank_tol: opts.rank_tol,
        slabs,
    })
}
