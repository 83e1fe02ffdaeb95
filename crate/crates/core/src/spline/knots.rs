use serde::{Deserialize, Serialize};

use super::divdiff::MAX_DEGREE;
use crate::error::{Error, Result};

/// Clamped knot sequence `τ_n(α)` of a degree-`ℓ` spline on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KnotVectorRepr", into = "KnotVectorRepr")]
pub struct KnotVector {
    degree: usize,
    a: f64,
    b: f64,
    interior: Vec<f64>,
    full: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct KnotVectorRepr {
    degree: usize,
    a: f64,
    b: f64,
    interior: Vec<f64>,
}

impl TryFrom<KnotVectorRepr> for KnotVector {
    type Error = Error;

    fn try_from(r: KnotVectorRepr) -> Result<Self> {
        KnotVector::new(r.degree, r.a, r.b, r.interior)
    }
}

impl From<KnotVector> for KnotVectorRepr {
    fn from(k: KnotVector) -> Self {
        KnotVectorRepr {
            degree: k.degree,
            a: k.a,
            b: k.b,
            interior: k.interior,
        }
    }
}

impl KnotVector {
    /// Interior knots must satisfy `a < α_1 < … < α_{n-1} < b`.
    pub fn new(degree: usize, a: f64, b: f64, interior: Vec<f64>) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidDegree(degree));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidKnots(format!("domain [{a}, {b}] is empty")));
        }
        let mut prev = a;
        for &t in &interior {
            if !(t.is_finite() && t > prev) {
                return Err(Error::InvalidKnots(format!(
                    "interior knots must be strictly increasing inside ({a}, {b})"
                )));
            }
            prev = t;
        }
        if prev >= b && !interior.is_empty() {
            return Err(Error::InvalidKnots(format!(
                "interior knot {prev} not below b = {b}"
            )));
        }
        let mut full = Vec::with_capacity(interior.len() + 2 * degree + 3);
        full.extend(std::iter::repeat_n(a, degree + 1));
        full.extend_from_slice(&interior);
        full.extend(std::iter::repeat_n(b, degree + 1));
        Ok(KnotVector {
            degree,
            a,
            b,
            interior,
            full,
        })
    }

    /// Sorts the interior knots before validating; permutations of the same
    /// set collapse onto one canonical vector.
    pub fn canonical(degree: usize, a: f64, b: f64, mut interior: Vec<f64>) -> Result<Self> {
        interior.sort_by(f64::total_cmp);
        Self::new(degree, a, b, interior)
    }

    /// Equispaced interior knots: `n_knots` knots in total including `a` and `b`.
    pub fn uniform(degree: usize, a: f64, b: f64, n_knots: usize) -> Result<Self> {
        if n_knots < 2 {
            return Err(Error::InvalidKnots("need at least the two boundary knots".into()));
        }
        let n = n_knots - 1;
        let interior = (1..n).map(|j| a + (b - a) * j as f64 / n as f64).collect();
        Self::new(degree, a, b, interior)
    }

    pub fn with_interior(&self, interior: Vec<f64>) -> Result<Self> {
        Self::new(self.degree, self.a, self.b, interior)
    }

    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        Self::new(degree, self.a, self.b, self.interior.clone())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    /// `τ_n(α)`, `n + 2ℓ + 1` entries.
    pub fn full(&self) -> &[f64] {
        &self.full
    }

    /// Number of spans `n`; the vector holds `n + 1` distinct knots.
    pub fn n(&self) -> usize {
        self.interior.len() + 1
    }

    /// Number of distinct knots, boundaries included.
    pub fn n_knots(&self) -> usize {
        self.interior.len() + 2
    }

    /// Dimension `n + ℓ` of the spline space.
    pub fn dim(&self) -> usize {
        self.n() + self.degree
    }

    /// Knot `t_k` for `-ℓ ≤ k ≤ n + ℓ`.
    pub fn t(&self, k: isize) -> Result<f64> {
        let i = k + self.degree as isize;
        if i < 0 || i as usize >= self.full.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.full.len(),
            });
        }
        Ok(self.full[i as usize])
    }

    /// Column (0-based) of basis index `k`.
    pub(crate) fn column(&self, k: isize) -> Result<usize> {
        let c = k + self.degree as isize;
        if c < 0 || c as usize >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.dim(),
            });
        }
        Ok(c as usize)
    }

    /// Support `[t_k, t_{k+ℓ+1}]` of column `c`.
    pub(crate) fn support(&self, c: usize) -> (f64, f64) {
        (self.full[c], self.full[c + self.degree + 1])
    }

    /// Index `s` of the span `[t_s, t_{s+1})` containing `x`, with `b` mapped
    /// to the last span. Returned as a position in `full`.
    pub(crate) fn span_of(&self, x: f64) -> usize {
        let l = self.degree;
        let last = self.full.len() - l - 2;
        if x >= self.b {
            return last;
        }
        // first index in full with value > x, minus one
        let p = self.full.partition_point(|&t| t <= x);
        (p.max(l + 1) - 1).min(last)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}
