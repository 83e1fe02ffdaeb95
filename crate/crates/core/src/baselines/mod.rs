//! Comparison strategies: knot reduction (KR), and variable projection
//! started from uniform (UVP) or random (RVP) knots.

mod banded;
mod init;
mod kr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use init::{random_init, uniform_init};
pub use kr::{knot_reduction, knot_reduction_trace, KrTrace, DEFAULT_KR_CAP};

use crate::metrics::{compression_ratio, error_report, ErrorReport};
use crate::varpro::{vp_optimize, FitReport, VpOptions};
use crate::{Error, Result, Signal, SplineModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMethod {
    Kr,
    Uvp,
    Rvp,
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineMethod::Kr => "kr",
            BaselineMethod::Uvp => "uvp",
            BaselineMethod::Rvp => "rvp",
        })
    }
}

impl FromStr for BaselineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kr" => Ok(BaselineMethod::Kr),
            "uvp" => Ok(BaselineMethod::Uvp),
            "rvp" => Ok(BaselineMethod::Rvp),
            other => Err(Error::Config(format!("unknown baseline '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    /// Knot count `n + 1`, boundaries included.
    pub target_knots: usize,
    pub degree: usize,
    /// Required for RVP.
    pub seed: Option<u64>,
    pub vp: VpOptions,
    /// Initial knot cap for KR.
    pub kr_cap: usize,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod, target_knots: usize) -> Self {
        BaselineConfig {
            method,
            target_knots,
            degree: 3,
            seed: None,
            vp: VpOptions::default(),
            kr_cap: DEFAULT_KR_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub config: BaselineConfig,
    pub model: SplineModel,
    pub errors: ErrorReport,
    pub cr: f64,
    /// Refinement report for UVP and RVP.
    pub fit: Option<FitReport>,
}

pub fn run_baseline(sig: &Signal, cfg: &BaselineConfig) -> Result<BaselineResult> {
    if cfg.target_knots < 2 {
        return Err(Error::Config("target_knots must be at least 2".into()));
    }
    let n = cfg.target_knots - 1;
    let (model, fit) = match cfg.method {
        BaselineMethod::Kr => {
            let trace = knot_reduction_trace(sig, cfg.degree, cfg.target_knots, cfg.kr_cap)?;
            (trace.model, None)
        }
        BaselineMethod::Uvp => {
            let init = uniform_init(sig.a(), sig.b(), n)?;
            let (m, r) = vp_optimize(sig, &init, cfg.degree, &cfg.vp)?;
            (m, Some(r))
        }
        BaselineMethod::Rvp => {
            let seed = cfg
                .seed
                .ok_or_else(|| Error::Config("random initialization needs a seed".into()))?;
            let init = random_init(sig.a(), sig.b(), n, sig.h(), seed)?;
            let (m, r) = vp_optimize(sig, &init, cfg.degree, &cfg.vp)?;
            (m, Some(r))
        }
    };
    let fitted = model.eval(sig.x())?;
    let errors = error_report(sig.f(), &fitted, model.knots.n(), cfg.degree)?;
    Ok(BaselineResult {
        config: cfg.clone(),
        cr: compression_ratio(sig.len(), model.knots.n(), cfg.degree),
        model,
        errors,
        fit,
    })
}
