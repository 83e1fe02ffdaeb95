//! Symmetric positive-definite banded systems.

/// Lower band of a symmetric matrix: `band[i][k] = A(i, i − k)`, `k ≤ w`.
#[derive(Debug, Clone)]
pub(crate) struct SymBand {
    w: usize,
    band: Vec<Vec<f64>>,
}

impl SymBand {
    pub fn zeros(dim: usize, w: usize) -> Self {
        SymBand {
            w,
            band: vec![vec![0.0; w + 1]; dim],
        }
    }

    /// Adds `v` to `A(i, j)` for `j ≤ i`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.band[i][i - j] += v;
    }

    /// Solves `A x = rhs` by banded Cholesky; `None` if not positive definite.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let d = self.band.len();
        let w = self.w;
        let mut l = vec![vec![0.0; w + 1]; d];
        for i in 0..d {
            let j0 = i.saturating_sub(w);
            for j in j0..=i {
                let mut s = self.band[i][i - j];
                for p in j0.max(j.saturating_sub(w))..j {
                    s -= l[i][i - p] * l[j][j - p];
                }
                if j == i {
                    if !(s > 0.0) {
                        return None;
                    }
                    l[i][0] = s.sqrt();
                } else {
                    l[i][i - j] = s / l[j][0];
                }
            }
        }
        let mut y = rhs.to_vec();
        for i in 0..d {
            for j in i.saturating_sub(w)..i {
                y[i] -= l[i][i - j] * y[j];
            }
            y[i] /= l[i][0];
        }
        for i in (0..d).rev() {
            for k in i + 1..(i + w + 1).min(d) {
                y[i] -= l[k][k - i] * y[k];
            }
            y[i] /= l[i][0];
        }
        Some(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn matches_dense_solve() {
        let d = 9;
        let w = 3;
        let mut dense = DMatrix::zeros(d, d);
        let mut band = SymBand::zeros(d, w);
        for i in 0..d {
            for j in i.saturating_sub(w)..=i {
                let v = if i == j { 10.0 + i as f64 } else { 1.0 / (1.0 + (i + 2 * j) as f64) };
                dense[(i, j)] = v;
                dense[(j, i)] = v;
                band.add(i, j, v);
            }
        }
        let rhs: Vec<f64> = (0..d).map(|i| (i as f64).cos()).collect();
        let x = band.solve(&rhs).unwrap();
        let x_ref = dense.lu().solve(&DVector::from_vec(rhs)).unwrap();
        for (a, b) in x.iter().zip(x_ref.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut band = SymBand::zeros(2, 1);
        band.add(0, 0, 1.0);
        band.add(1, 0, 2.0);
        band.add(1, 1, 1.0);
        assert!(band.solve(&[1.0, 1.0]).is_none());
    }
}
