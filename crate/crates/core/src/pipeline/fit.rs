use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::foba::{estimate_knot_count, foba_error_curve, knot_pred, Norm};
use crate::metrics::error_report;
use crate::varpro::{vp_optimize, FitReport, VpOptions};
use crate::{Error, KnotVector, Result, Signal, SplineModel};

/// Knot count `n + 1`, fixed or read off the FOBA error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum KnotBudget {
    Fixed { knots: usize },
    Auto { tau: f64, max_knots: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub norm: Norm,
    pub knots: KnotBudget,
    pub degree: usize,
    /// Minimum knot spacing for prediction, in samples.
    pub delta: usize,
    pub vp: VpOptions,
    pub normalize: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            norm: Norm::L2,
            knots: KnotBudget::Fixed { knots: 25 },
            degree: 3,
            delta: 1,
            vp: VpOptions::default(),
            normalize: true,
        }
    }
}

impl FitConfig {
    /// Smallest segment that is fitted, `2(n + ℓ)` samples; `None` in auto mode.
    pub fn min_samples(&self) -> Option<usize> {
        match self.knots {
            KnotBudget::Fixed { knots } => Some(2 * (knots.saturating_sub(1) + self.degree)),
            KnotBudget::Auto { .. } => None,
        }
    }
}

/// Affine map applied before fitting: `f_norm = (f − offset) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub offset: f64,
    pub scale: f64,
}

impl Normalization {
    pub const IDENTITY: Normalization = Normalization {
        offset: 0.0,
        scale: 1.0,
    };

    /// Zero mean, unit maximum magnitude.
    pub fn of(f: &[f64]) -> Self {
        let offset = f.iter().sum::<f64>() / f.len() as f64;
        let scale = f.iter().map(|v| (v - offset).abs()).fold(0.0, f64::max);
        Normalization {
            offset,
            scale: if scale > 0.0 { scale } else { 1.0 },
        }
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        f.iter().map(|v| (v - self.offset) / self.scale).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutcome {
    /// Fitted model in the signal's original units.
    pub model: SplineModel,
    pub foba_knots: KnotVector,
    /// PRDN of the least-squares fit on the predicted knots.
    pub foba_prdn: Option<f64>,
    /// Errors in original units are in `report.errors`.
    pub report: FitReport,
    pub normalization: Normalization,
    #[serde(skip)]
    pub foba_time: Duration,
    #[serde(skip)]
    pub vp_time: Duration,
}

fn resolve_knots(sig: &Signal, cfg: &FitConfig) -> Result<usize> {
    match cfg.knots {
        KnotBudget::Fixed { knots } => Ok(knots),
        KnotBudget::Auto { tau, max_knots } => {
            if !(tau >= 0.0) {
                return Err(Error::Config(format!("tau must be nonnegative, got {tau}")));
            }
            let room = (sig.len() - 1) / cfg.delta.max(1) + 1;
            let limit = max_knots.min(room).min(sig.len().saturating_sub(cfg.degree) + 1);
            let curve = foba_error_curve(sig, limit.max(2), cfg.delta, cfg.norm)?;
            Ok(estimate_knot_count(&curve, tau))
        }
    }
}

/// Predicts knots, refines them and reports errors in original units.
pub fn fit_signal(sig: &Signal, cfg: &FitConfig) -> Result<FitOutcome> {
    let norm = if cfg.normalize {
        Normalization::of(sig.f())
    } else {
        Normalization::IDENTITY
    };
    let work = sig.with_samples(norm.apply(sig.f()))?;
    let t0 = Instant::now();
    let n_knots = resolve_knots(&work, cfg)?;
    let foba = knot_pred(&work, n_knots, cfg.delta, cfg.norm)?;
    let foba_time = t0.elapsed();
    let t1 = Instant::now();
    let (model, mut report) = vp_optimize(&work, &foba, cfg.degree, &cfg.vp)?;
    let vp_time = t1.elapsed();
    let model = model.affine(norm.scale, norm.offset);
    let fitted = model.eval(sig.x())?;
    report.errors = error_report(sig.f(), &fitted, model.knots.n(), cfg.degree)?;
    let fnorm: Vec<f64> = work.f().to_vec();
    let mean = fnorm.iter().sum::<f64>() / fnorm.len() as f64;
    let den: f64 = fnorm.iter().map(|v| (v - mean).powi(2)).sum();
    let foba_prdn = (den > 0.0).then(|| 100.0 * (report.objectives[0] / den).sqrt());
    Ok(FitOutcome {
        model,
        foba_knots: foba,
        foba_prdn,
        report,
        normalization: norm,
        foba_time,
        vp_time,
    })
}
