use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::fit::{fit_signal, FitConfig, KnotBudget};
use super::segment::segment_beats;
use crate::baselines::{run_baseline, BaselineConfig, BaselineMethod};
use crate::metrics::{
    add_noise, load_titanium, sample_test_function, synthetic_ecg, EcgConfig, ErrorReport,
    TestFunction,
};
use crate::varpro::VpOptions;
use crate::{Error, Norm, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchSuite {
    Table2,
    Synthetic,
}

impl fmt::Display for BenchSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchSuite::Table2 => "table2",
            BenchSuite::Synthetic => "synthetic",
        })
    }
}

impl FromStr for BenchSuite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table2" => Ok(BenchSuite::Table2),
            "synthetic" => Ok(BenchSuite::Synthetic),
            _ => Err(Error::Config(format!("unknown bench suite '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Rss,
    Mse,
    Bre,
    Bic,
    Prdn,
}

impl Measure {
    fn of(self, e: &ErrorReport) -> Option<f64> {
        match self {
            Measure::Rss => Some(e.rss),
            Measure::Mse => Some(e.mse),
            Measure::Bre => Some(e.bre),
            Measure::Bic => e.bic,
            Measure::Prdn => e.eps2,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Rss => "rss",
            Measure::Mse => "mse",
            Measure::Bre => "bre",
            Measure::Bic => "bic",
            Measure::Prdn => "prdn",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub suite: BenchSuite,
    /// Test function or strategy name.
    pub case: String,
    pub method: String,
    pub noise: Option<(f64, f64)>,
    pub n_samples: usize,
    pub n_knots: usize,
    pub norm: Option<Norm>,
    pub measure: Measure,
    pub iterations: Option<usize>,
    pub evaluations: Option<usize>,
    pub value: Option<f64>,
    /// Reference value for the configuration, when there is one.
    pub target: Option<f64>,
    pub status: RowStatus,
    pub reason: Option<String>,
    #[serde(skip)]
    pub seconds: f64,
}

struct Table2Case {
    id: TestFunction,
    noise: Option<(f64, f64)>,
    n: usize,
    knots: usize,
    iters: usize,
    target: f64,
    measure: Measure,
    norm: Norm,
}

#[allow(clippy::too_many_arguments)]
const fn case(
    id: TestFunction,
    noise: Option<(f64, f64)>,
    n: usize,
    knots: usize,
    iters: usize,
    target: f64,
    measure: Measure,
    norm: Norm,
) -> Table2Case {
    Table2Case {
        id,
        noise,
        n,
        knots,
        iters,
        target,
        measure,
        norm,
    }
}

const TABLE2: [Table2Case; 9] = [
    case(TestFunction::F1, Some((-0.3, 0.3)), 256, 8, 4, 7.9950, Measure::Rss, Norm::Linf),
    case(TestFunction::F2, None, 49, 9, 20, 0.00209, Measure::Rss, Norm::Linf),
    case(TestFunction::F3, None, 101, 15, 4, 0.00019, Measure::Mse, Norm::L2),
    case(TestFunction::F4, Some((-0.05, 0.05)), 200, 15, 4, 0.00082, Measure::Mse, Norm::L1),
    case(TestFunction::F2, None, 49, 7, 5, 0.01325, Measure::Bre, Norm::L1),
    case(TestFunction::F2, None, 49, 8, 6, 0.00874, Measure::Bre, Norm::Linf),
    case(TestFunction::F3, None, 201, 6, 7, 332.0, Measure::Bic, Norm::L1),
    case(TestFunction::F5, None, 201, 7, 14, 471.0, Measure::Bic, Norm::Linf),
    case(TestFunction::F6, None, 201, 10, 19, 1491.0, Measure::Bic, Norm::L2),
];

/// Options shared by both suites.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub seed: u64,
    /// Titanium heat data; rows that need it are skipped without it.
    pub titanium: Option<PathBuf>,
}

fn table2_signal(c: &Table2Case, opts: &BenchOptions) -> Result<Signal> {
    let sig = match c.id {
        TestFunction::F2 => match &opts.titanium {
            Some(p) => load_titanium(p)?,
            None => return Err(Error::MissingData("titanium data not supplied".into())),
        },
        id => sample_test_function(id, c.n)?,
    };
    match c.noise {
        Some((lo, hi)) => add_noise(&sig, lo, hi, opts.seed),
        None => Ok(sig),
    }
}

fn table2_row(c: &Table2Case, opts: &BenchOptions) -> BenchRow {
    let mut row = BenchRow {
        suite: BenchSuite::Table2,
        case: c.id.to_string(),
        method: "foba+vp".into(),
        noise: c.noise,
        n_samples: c.n,
        n_knots: c.knots,
        norm: Some(c.norm),
        measure: c.measure,
        iterations: None,
        evaluations: None,
        value: None,
        target: Some(c.target),
        status: RowStatus::Ok,
        reason: None,
        seconds: 0.0,
    };
    let t0 = Instant::now();
    let sig = match table2_signal(c, opts) {
        Ok(s) => s,
        Err(e @ Error::MissingData(_)) => {
            row.status = RowStatus::Skipped;
            row.reason = Some(e.to_string());
            return row;
        }
        Err(e) => {
            row.status = RowStatus::Failed;
            row.reason = Some(e.to_string());
            return row;
        }
    };
    row.n_samples = sig.len();
    // Fixed reference iteration counts, run to completion.
    let cfg = FitConfig {
        norm: c.norm,
        knots: KnotBudget::Fixed { knots: c.knots },
        degree: 3,
        delta: 1,
        vp: VpOptions {
            max_iter: c.iters,
            term_tol: 0.0,
            ..Default::default()
        },
        normalize: false,
    };
    match fit_signal(&sig, &cfg) {
        Ok(out) => {
            row.iterations = Some(out.report.iterations);
            row.evaluations = Some(out.report.evaluations);
            row.value = c.measure.of(&out.report.errors);
        }
        Err(e) => {
            row.status = RowStatus::Failed;
            row.reason = Some(e.to_string());
        }
    }
    row.seconds = t0.elapsed().as_secs_f64();
    row
}

/// Beat-wise strategy comparison on a synthetic ECG train.
fn synthetic_rows(opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    const KNOTS: usize = 25;
    const ITERS: usize = 4;
    let sig = synthetic_ecg(&EcgConfig {
        beats: 12,
        seed: opts.seed,
        ..Default::default()
    })?;
    let vp = VpOptions {
        max_iter: ITERS,
        term_tol: 0.0,
        ..Default::default()
    };
    let min_len = 2 * (KNOTS - 1 + 3);
    let beats: Vec<Signal> = segment_beats(&sig, min_len)?
        .iter()
        .filter(|s| s.skipped.is_none())
        .map(|s| s.view(&sig))
        .collect::<Result<_>>()?;

    let mut methods: Vec<(String, Option<Norm>)> =
        Norm::ALL.iter().map(|n| (format!("foba-{n}+vp"), Some(*n))).collect();
    for m in ["uvp", "rvp", "kr"] {
        methods.push((m.to_string(), None));
    }
    let mut rows = Vec::new();
    for (name, norm) in methods {
        let t0 = Instant::now();
        let mut prdn = Vec::new();
        let mut iters = 0;
        let mut evals = 0;
        let mut failure = None;
        for (i, beat) in beats.iter().enumerate() {
            let res = match norm {
                Some(norm) => fit_signal(
                    beat,
                    &FitConfig {
                        norm,
                        knots: KnotBudget::Fixed { knots: KNOTS },
                        vp: vp.clone(),
                        ..Default::default()
                    },
                )
                .map(|o| (o.report.errors.eps2, Some(o.report))),
                None => {
                    let method: BaselineMethod = name.parse()?;
                    let mut cfg = BaselineConfig::new(method, KNOTS);
                    cfg.vp = vp.clone();
                    cfg.seed = Some(opts.seed.wrapping_add(i as u64));
                    run_baseline(beat, &cfg).map(|r| (r.errors.eps2, r.fit))
                }
            };
            match res {
                Ok((p, fit)) => {
                    prdn.extend(p);
                    if let Some(f) = fit {
                        iters += f.iterations;
                        evals += f.evaluations;
                    }
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
        let mean = (!prdn.is_empty()).then(|| prdn.iter().sum::<f64>() / prdn.len() as f64);
        rows.push(BenchRow {
            suite: BenchSuite::Synthetic,
            case: "ecg".into(),
            method: name,
            noise: None,
            n_samples: sig.len(),
            n_knots: KNOTS,
            norm,
            measure: Measure::Prdn,
            iterations: (iters > 0).then_some(iters),
            evaluations: (evals > 0).then_some(evals),
            value: mean,
            target: None,
            status: if failure.is_some() {
                RowStatus::Failed
            } else {
                RowStatus::Ok
            },
            reason: failure,
            seconds: t0.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

pub fn run_bench(suite: BenchSuite, opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    match suite {
        BenchSuite::Table2 => Ok(TABLE2.iter().map(|c| table2_row(c, opts)).collect()),
        BenchSuite::Synthetic => synthetic_rows(opts),
    }
}

fn opt_float(v: Option<f64>) -> String {
    v.map(super::output::fmt_float).unwrap_or_default()
}

/// Writes the rows as CSV; per-row timings go to a separate file if asked.
pub fn write_bench_csv(rows: &[BenchRow], path: &Path, timings: Option<&Path>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    let header = [
        "suite", "case", "method", "noise_lo", "noise_hi", "n_samples", "n_knots", "norm",
        "measure", "iterations", "evaluations", "value", "target", "status", "reason",
    ];
    w.write_record(header)?;
    for r in rows {
        let rec = [
            r.suite.to_string(),
            r.case.clone(),
            r.method.clone(),
            opt_float(r.noise.map(|n| n.0)),
            opt_float(r.noise.map(|n| n.1)),
            r.n_samples.to_string(),
            r.n_knots.to_string(),
            r.norm.map(|n| n.to_string()).unwrap_or_default(),
            r.measure.to_string(),
            r.iterations.map(|v| v.to_string()).unwrap_or_default(),
            r.evaluations.map(|v| v.to_string()).unwrap_or_default(),
            opt_float(r.value),
            opt_float(r.target),
            format!("{:?}", r.status).to_lowercase(),
            r.reason.clone().unwrap_or_default(),
        ];
        w.write_record(&rec)?;
    }
    w.flush()?;
    if let Some(tp) = timings {
        let mut tw = csv::Writer::from_path(tp)?;
        tw.write_record(["case", "method", "measure", "seconds"])
            ?;
        for r in rows {
            tw.write_record([
                r.case.clone(),
                r.method.clone(),
                r.measure.to_string(),
                format!("{:.6}", r.seconds),
            ])
            ?;
        }
        tw.flush()?;
    }
    Ok(())
}
