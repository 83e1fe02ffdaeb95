//! Uniformly sampled time series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the sample spacing for a grid to count as uniform.
pub const UNIFORM_TOL: f64 = 1e-9;

/// A uniformly sampled signal with optional beat annotations (sample indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    x: Vec<f64>,
    f: Vec<f64>,
    annotations: Option<Vec<usize>>,
}

impl Signal {
    /// Builds a signal from abscissae and samples, rejecting non-uniform grids.
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if x.len() != f.len() {
            return Err(Error::InvalidSignal(format!(
                "abscissae ({}) and samples ({}) differ in length",
                x.len(),
                f.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidSignal("at least two samples required".into()));
        }
        if x.iter().chain(f.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal("non-finite value".into()));
        }
        let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
        if h <= 0.0 {
            return Err(Error::InvalidSignal("abscissae must be strictly increasing".into()));
        }
        for w in x.windows(2) {
            let d = w[1] - w[0];
            if d <= 0.0 {
                return Err(Error::InvalidSignal("abscissae must be strictly increasing".into()));
            }
            if ((d - h) / h).abs() > UNIFORM_TOL.max(1e3 * f64::EPSILON * w[1].abs().max(1.0) / h) {
                return Err(Error::InvalidSignal(format!(
                    "non-uniform sampling: step {d} deviates from mean step {h}"
                )));
            }
        }
        Ok(Signal {
            x,
            f,
            annotations: None,
        })
    }

    /// Signal sampled at `x0 + i * h`.
    pub fn uniform(x0: f64, h: f64, f: Vec<f64>) -> Result<Self> {
        let x = (0..f.len()).map(|i| x0 + i as f64 * h).collect();
        Self::new(x, f)
    }

    /// `n` samples of `func` on `[a, b]`, endpoints included.
    pub fn sample_fn(a: f64, b: f64, n: usize, func: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSignal("at least two samples required".into()));
        }
        let h = (b - a) / (n - 1) as f64;
        let x: Vec<f64> = (0..n)
            .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
            .collect();
        let f = x.iter().map(|&t| func(t)).collect();
        Self::new(x, f)
    }

    pub fn with_annotations(mut self, ann: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = ann.iter().find(|&&i| i >= self.len()) {
            return Err(Error::InvalidSignal(format!(
                "annotation index {bad} outside 0..{}",
                self.len()
            )));
        }
        if ann.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSignal("annotations must be strictly ascending".into()));
        }
        self.annotations = Some(ann);
        Ok(self)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn annotations(&self) -> Option<&[usize]> {
        self.annotations.as_deref()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Sample spacing.
    pub fn h(&self) -> f64 {
        (self.x[self.len() - 1] - self.x[0]) / (self.len() - 1) as f64
    }

    pub fn a(&self) -> f64 {
        self.x[0]
    }

    pub fn b(&self) -> f64 {
        self.x[self.len() - 1]
    }

    /// Same grid, different samples.
    pub fn with_samples(&self, f: Vec<f64>) -> Result<Self> {
        if f.len() != self.len() {
            return Err(Error::InvalidSignal("sample count mismatch".into()));
        }
        Ok(Signal {
            x: self.x.clone(),
            f,
            annotations: self.annotations.clone(),
        })
    }

    /// Contiguous sub-signal `[start, end)`; annotations are dropped.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidSignal(format!(
                "slice [{start}, {end}) outside 0..{}",
                self.len()
            )));
        }
        Self::new(self.x[start..end].to_vec(), self.f[start..end].to_vec())
    }

    /// Index of the sample nearest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.a()) / self.h()).round();
        (i.max(0.0) as usize).min(self.len() - 1)
    }
}
