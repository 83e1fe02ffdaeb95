use serde::{Deserialize, Serialize};

use crate::foba::Norm;
use crate::{Error, Result};

/// Approximation errors of `f̃` against `f`.
///
/// `n` is the number of knot intervals (`n + 1` knots including the
/// boundaries). Undefined measures are `None`: BIC when `RSS = 0`, the
/// relative errors when `f` is constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub n_samples: usize,
    pub n: usize,
    pub degree: usize,
    pub rss: f64,
    pub mse: f64,
    pub bre: f64,
    pub bic: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub eps_inf: Option<f64>,
}

impl ErrorReport {
    /// PRDN, the relative `ℓ2` error in percent.
    pub fn prdn(&self) -> Option<f64> {
        self.eps2
    }

    pub fn eps(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::L1 => self.eps1,
            Norm::L2 => self.eps2,
            Norm::Linf => self.eps_inf,
        }
    }
}

fn norm_p(v: impl Iterator<Item = f64>, norm: Norm) -> f64 {
    match norm {
        Norm::L1 => v.map(f64::abs).sum(),
        Norm::L2 => v.map(|x| x * x).sum::<f64>().sqrt(),
        Norm::Linf => v.map(f64::abs).fold(0.0, f64::max),
    }
}

/// `ε_p = 100 · ‖f − f̃‖_p / ‖f − mean(f)‖_p`; `None` for constant `f`.
pub fn relative_error(f: &[f64], f_tilde: &[f64], norm: Norm) -> Option<f64> {
    if f.is_empty() {
        return None;
    }
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    let den = norm_p(f.iter().map(|v| v - mean), norm);
    if den == 0.0 {
        return None;
    }
    let num = norm_p(f.iter().zip(f_tilde).map(|(a, b)| a - b), norm);
    Some(100.0 * num / den)
}

pub fn prdn(f: &[f64], f_tilde: &[f64]) -> Option<f64> {
    relative_error(f, f_tilde, Norm::L2)
}

pub fn error_report(f: &[f64], f_tilde: &[f64], n: usize, degree: usize) -> Result<ErrorReport> {
    if f.len() != f_tilde.len() {
        return Err(Error::Data(format!(
            "length mismatch: {} samples vs {} reconstructed",
            f.len(),
            f_tilde.len()
        )));
    }
    let big_n = f.len();
    if big_n < 2 {
        return Err(Error::Data("need at least 2 samples".into()));
    }
    let e2: Vec<f64> = f.iter().zip(f_tilde).map(|(a, b)| (a - b) * (a - b)).collect();
    let rss: f64 = e2.iter().sum();
    let weighted = rss - 0.5 * (e2[0] + e2[big_n - 1]);
    let bre = (weighted / (big_n - 1) as f64).max(0.0).sqrt();
    let params = (2 * n as isize - 2 + degree as isize + 1) as f64;
    let bic = (rss > 0.0).then(|| big_n as f64 * rss.ln() + (big_n as f64 * params).ln());
    Ok(ErrorReport {
        n_samples: big_n,
        n,
        degree,
        rss,
        mse: rss / big_n as f64,
        bre,
        bic,
        eps1: relative_error(f, f_tilde, Norm::L1),
        eps2: relative_error(f, f_tilde, Norm::L2),
        eps_inf: relative_error(f, f_tilde, Norm::Linf),
    })
}

/// `N / (2n + ℓ + 1)`: samples over stored knots and coefficients.
pub fn compression_ratio(n_samples: usize, n: usize, degree: usize) -> f64 {
    n_samples as f64 / (2 * n + degree + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_fit() {
        let f = [1.0, 3.0, -2.0, 5.0];
        let r = error_report(&f, &f, 3, 3).unwrap();
        assert_eq!((r.rss, r.mse, r.bre), (0.0, 0.0, 0.0));
        assert_eq!(r.bic, None);
        assert_eq!(r.eps2, Some(0.0));
    }

    #[test]
    fn mean_fit_is_hundred_percent() {
        let f = [1.0, 3.0, -2.0, 5.0, 0.5];
        let m = f.iter().sum::<f64>() / 5.0;
        let r = error_report(&f, &[m; 5], 2, 1).unwrap();
        for e in [r.eps1, r.eps2, r.eps_inf] {
            assert_relative_eq!(e.unwrap(), 100.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bic_follows_formula() {
        // RSS = e, N = 201, n = 6, ℓ = 3: 201 + ln(201 · (2·5 + 4))
        let mut f = vec![0.0; 201];
        f[0] = std::f64::consts::E.sqrt();
        let r = error_report(&f, &[0.0; 201], 6, 3).unwrap();
        assert_relative_eq!(r.rss, std::f64::consts::E, epsilon = 1e-15);
        assert_relative_eq!(r.bic.unwrap(), 201.0 + (201.0f64 * 14.0).ln(), epsilon = 1e-12);
        assert!((r.bic.unwrap() - 208.942).abs() < 1e-3);
    }

    #[test]
    fn bre_weights_endpoints() {
        let f = [0.0; 5];
        let g = [2.0, 1.0, 1.0, 1.0, 2.0];
        let r = error_report(&f, &g, 1, 0).unwrap();
        // (0.5·4 + 3 + 0.5·4) / 4
        assert_relative_eq!(r.bre, (7.0f64 / 4.0).sqrt(), epsilon = 1e-15);
        assert_eq!(r.rss, 11.0);
        assert_eq!(r.mse * 5.0, r.rss);
    }

    #[test]
    fn constant_signal_relative_errors_undefined() {
        let r = error_report(&[2.0; 4], &[1.0; 4], 1, 0).unwrap();
        assert_eq!((r.eps1, r.eps2, r.eps_inf), (None, None, None));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(error_report(&[1.0, 2.0], &[1.0], 1, 0), Err(Error::Data(_))));
    }

    #[test]
    fn cr() {
        assert_relative_eq!(compression_ratio(360, 24, 3), 360.0 / 52.0);
        assert_eq!(compression_ratio(52, 24, 3), 1.0);
    }
}
