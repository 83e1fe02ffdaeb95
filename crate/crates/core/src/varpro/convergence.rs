use serde::{Deserialize, Serialize};

/// Asymptotic rate `μ` and order `ρ` from `‖ε_{k+1}‖ ≈ μ ‖ε_k‖^ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEstimate {
    pub mu: Option<f64>,
    pub rho: Option<f64>,
    /// `(ln ‖ε_k‖, ln ‖ε_{k+1}‖)` regression data.
    pub pairs: Vec<(f64, f64)>,
}

impl ConvergenceEstimate {
    pub fn is_defined(&self) -> bool {
        self.mu.is_some()
    }
}

/// Regression on consecutive step norms `‖ε_k‖`. Pairs containing a zero
/// step are dropped; fewer than 3 pairs leave the estimate undefined.
pub fn estimate_convergence_from_steps(steps: &[f64]) -> ConvergenceEstimate {
    let pairs: Vec<(f64, f64)> = steps
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| (w[0].ln(), w[1].ln()))
        .collect();
    let undefined = |pairs| ConvergenceEstimate {
        mu: None,
        rho: None,
        pairs,
    };
    if pairs.len() < 3 {
        return undefined(pairs);
    }
    let k = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return undefined(pairs);
    }
    let rho = sxy / sxx;
    let intercept = my - rho * mx;
    ConvergenceEstimate {
        mu: Some(intercept.exp()),
        rho: Some(rho),
        pairs,
    }
}

/// Estimate from a trajectory of knot iterates `α^(0), α^(1), …`.
pub fn estimate_convergence(trajectory: &[Vec<f64>]) -> ConvergenceEstimate {
    let steps: Vec<f64> = trajectory
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    estimate_convergence_from_steps(&steps)
}
