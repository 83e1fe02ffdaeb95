use serde::{Deserialize, Serialize};

use super::basis::{basis_col, normalization_col};
use super::knots::KnotVector;
use crate::error::{Error, Result};

/// Degree, knots and coefficients of the unnormalized basis: the compressed
/// representation of a signal segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineModel {
    pub knots: KnotVector,
    pub coeffs: Vec<f64>,
}

impl SplineModel {
    pub fn new(knots: KnotVector, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != knots.dim() {
            return Err(Error::Config(format!(
                "{} coefficients for a spline space of dimension {}",
                coeffs.len(),
                knots.dim()
            )));
        }
        Ok(SplineModel { knots, coeffs })
    }

    /// Model from coefficients of the normalized basis `N_{ℓ,k}`.
    pub fn from_normalized(knots: KnotVector, normalized: &[f64]) -> Result<Self> {
        let coeffs = normalized
            .iter()
            .enumerate()
            .map(|(c, d)| d * normalization_col(&knots, c))
            .collect();
        Self::new(knots, coeffs)
    }

    /// Coefficients with respect to the normalized basis.
    pub fn normalized_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(c, v)| v / normalization_col(&self.knots, c))
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    /// Value at a single point; no domain check.
    pub fn value(&self, x: f64) -> f64 {
        let l = self.knots.degree();
        let s = self.knots.span_of(x);
        (s - l..=s)
            .map(|c| self.coeffs[c] * basis_col(&self.knots, c, x))
            .sum()
    }

    pub fn eval(&self, xs: &[f64]) -> Result<Vec<f64>> {
        eval_model(self, xs)
    }

    /// `x ↦ scale · s(x) + offset`, exact since the normalized basis sums to one.
    pub fn affine(&self, scale: f64, offset: f64) -> SplineModel {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(c, v)| scale * v + offset * normalization_col(&self.knots, c))
            .collect();
        SplineModel {
            knots: self.knots.clone(),
            coeffs,
        }
    }

    /// Exact derivative of order `order ≤ ℓ`, a spline of degree `ℓ - order`
    /// on the same interior knots.
    pub fn derivative(&self, order: usize) -> Result<SplineModel> {
        if order > self.degree() {
            return Err(Error::InvalidDegree(order));
        }
        let mut d = self.normalized_coeffs();
        let mut knots = self.knots.clone();
        for _ in 0..order {
            let l = knots.degree();
            let t = knots.full();
            let e: Vec<f64> = (0..d.len() - 1)
                .map(|i| l as f64 * (d[i + 1] - d[i]) / (t[i + l + 1] - t[i + 1]))
                .collect();
            knots = knots.with_degree(l - 1)?;
            d = e;
        }
        SplineModel::from_normalized(knots, &d)
    }
}

/// `Σ_k c_k B_{ℓ,k}(x)` at every point of `xs`.
pub fn eval_model(model: &SplineModel, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            if model.knots.contains(x) {
                Ok(model.value(x))
            } else {
                Err(Error::Domain {
                    x,
                    a: model.knots.a(),
                    b: model.knots.b(),
                })
            }
        })
        .collect()
}
