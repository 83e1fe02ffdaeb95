use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_signal, FitConfig, FitOutcome, KnotBudget};
use super::ingest::{ingest, load_annotations, IngestOptions};
use super::output::{fmt_float, write_json};
use super::segment::{segment_beats, BeatSegment};
use crate::varpro::VpStatus;
use crate::{Result, Signal, SplineModel};

/// A compression run over files, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionJob {
    pub signal: PathBuf,
    pub annotations: Option<PathBuf>,
    pub fs: Option<f64>,
    pub fit: FitConfig,
    pub seed: u64,
    /// Output directory; not recorded in the summary so reruns elsewhere match.
    #[serde(skip)]
    pub out: PathBuf,
    /// Also write `reconstruction.csv`.
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSummary {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub annotation: Option<usize>,
    pub status: SegmentStatus,
    pub reason: Option<String>,
    pub n_knots: Option<usize>,
    pub prdn: Option<f64>,
    pub foba_prdn: Option<f64>,
    pub iterations: Option<usize>,
    pub vp_status: Option<VpStatus>,
    pub mu: Option<f64>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionSummary {
    pub config: FitConfig,
    pub n_samples: usize,
    pub beats: usize,
    pub fitted: usize,
    pub skipped: usize,
    pub failed: usize,
    /// Stored parameters `M`.
    pub stored: usize,
    pub cr: f64,
    /// PRDN pooled over all fitted samples.
    pub prdn: Option<f64>,
    /// Mean of per-segment PRDNs.
    pub mean_prdn: Option<f64>,
    pub foba_prdn: Option<f64>,
    pub mean_foba_prdn: Option<f64>,
    pub segments: Vec<SegmentSummary>,
}

/// Wall-clock time per stage, summed over segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub ingest_s: f64,
    pub predict_s: f64,
    pub refine_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone)]
pub struct CompressionOutcome {
    pub summary: CompressionSummary,
    /// De-normalized model per segment, `None` when skipped or failed.
    pub models: Vec<Option<SplineModel>>,
    pub segments: Vec<BeatSegment>,
    pub timings: Timings,
}

struct SegmentResult {
    summary: SegmentSummary,
    model: Option<SplineModel>,
    sq_err: f64,
    sq_dev: f64,
    foba_sq_err: f64,
    times: (Duration, Duration),
}

fn squared_dev(f: &[f64]) -> f64 {
    let m = f.iter().sum::<f64>() / f.len() as f64;
    f.iter().map(|v| (v - m).powi(2)).sum()
}

fn run_segment(sig: &Signal, seg: &BeatSegment, cfg: &FitConfig) -> SegmentResult {
    let mut summary = SegmentSummary {
        index: seg.index,
        start: seg.start,
        end: seg.end,
        annotation: seg.annotation,
        status: SegmentStatus::Skipped,
        reason: seg.skipped.clone(),
        n_knots: None,
        prdn: None,
        foba_prdn: None,
        iterations: None,
        vp_status: None,
        mu: None,
        rho: None,
    };
    let empty = |summary| SegmentResult {
        summary,
        model: None,
        sq_err: 0.0,
        sq_dev: 0.0,
        foba_sq_err: 0.0,
        times: Default::default(),
    };
    if seg.skipped.is_some() {
        return empty(summary);
    }
    let view = match seg.view(sig) {
        Ok(v) => v,
        Err(e) => {
            summary.status = SegmentStatus::Failed;
            summary.reason = Some(e.to_string());
            return empty(summary);
        }
    };
    let out: FitOutcome = match fit_signal(&view, cfg) {
        Ok(o) => o,
        Err(e) => {
            summary.status = SegmentStatus::Failed;
            summary.reason = Some(e.to_string());
            return empty(summary);
        }
    };
    let sq_dev = squared_dev(view.f());
    let rep = &out.report;
    summary.status = SegmentStatus::Ok;
    summary.n_knots = Some(out.model.knots.n_knots());
    summary.prdn = rep.errors.eps2;
    summary.foba_prdn = out.foba_prdn;
    summary.iterations = Some(rep.iterations);
    summary.vp_status = Some(rep.status);
    summary.mu = rep.convergence.mu;
    summary.rho = rep.convergence.rho;
    let foba_sq_err = out.foba_prdn.map_or(0.0, |p| (p / 100.0).powi(2) * sq_dev);
    SegmentResult {
        summary,
        sq_err: rep.errors.rss,
        sq_dev,
        foba_sq_err,
        model: Some(out.model),
        times: (out.foba_time, out.vp_time),
    }
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Fits every beat (or the whole signal without annotations) in parallel.
pub fn compress_signal(sig: &Signal, cfg: &FitConfig) -> Result<CompressionOutcome> {
    let start = Instant::now();
    let min_len = cfg.min_samples().unwrap_or(2 * (2 + cfg.degree));
    let segments = match sig.annotations() {
        Some(a) if a.len() >= 2 => segment_beats(sig, min_len)?,
        _ => vec![BeatSegment {
            index: 0,
            start: 0,
            end: sig.len(),
            annotation: sig.annotations().and_then(|a| a.first().copied()),
            skipped: (sig.len() < min_len)
                .then(|| format!("{} samples, need at least {min_len}", sig.len())),
        }],
    };
    let results: Vec<SegmentResult> = segments
        .par_iter()
        .map(|seg| run_segment(sig, seg, cfg))
        .collect();

    let fitted: Vec<&SegmentResult> = results
        .iter()
        .filter(|r| r.summary.status == SegmentStatus::Ok)
        .collect();
    let count = |s| results.iter().filter(|r| r.summary.status == s).count();
    let stored: usize = match cfg.knots {
        KnotBudget::Fixed { knots } => segments.len() * (2 * (knots - 1) + cfg.degree + 1),
        KnotBudget::Auto { .. } => results
            .iter()
            .zip(&segments)
            .map(|(r, s)| match r.summary.n_knots {
                Some(k) => 2 * (k - 1) + cfg.degree + 1,
                None => s.len(),
            })
            .sum(),
    };
    let pooled = |num: f64, den: f64| (den > 0.0).then(|| 100.0 * (num / den).sqrt());
    let sq_dev: f64 = fitted.iter().map(|r| r.sq_dev).sum();
    let summary = CompressionSummary {
        config: cfg.clone(),
        n_samples: sig.len(),
        beats: segments.len(),
        fitted: fitted.len(),
        skipped: count(SegmentStatus::Skipped),
        failed: count(SegmentStatus::Failed),
        stored,
        cr: sig.len() as f64 / stored as f64,
        prdn: pooled(fitted.iter().map(|r| r.sq_err).sum(), sq_dev),
        mean_prdn: mean(fitted.iter().filter_map(|r| r.summary.prdn)),
        foba_prdn: pooled(fitted.iter().map(|r| r.foba_sq_err).sum(), sq_dev),
        mean_foba_prdn: mean(fitted.iter().filter_map(|r| r.summary.foba_prdn)),
        segments: results.iter().map(|r| r.summary.clone()).collect(),
    };
    let timings = Timings {
        ingest_s: 0.0,
        predict_s: results.iter().map(|r| r.times.0.as_secs_f64()).sum(),
        refine_s: results.iter().map(|r| r.times.1.as_secs_f64()).sum(),
        total_s: start.elapsed().as_secs_f64(),
    };
    Ok(CompressionOutcome {
        summary,
        models: results.into_iter().map(|r| r.model).collect(),
        segments,
        timings,
    })
}

#[derive(Serialize)]
struct SegmentModelFile<'a> {
    index: usize,
    start: usize,
    end: usize,
    model: &'a SplineModel,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    job: &'a CompressionJob,
    #[serde(flatten)]
    summary: &'a CompressionSummary,
}

fn write_reconstruction(path: &Path, sig: &Signal, out: &CompressionOutcome) -> Result<()> {
    let mut recon = vec![f64::NAN; sig.len()];
    for (seg, model) in out.segments.iter().zip(&out.models) {
        if let Some(m) = model {
            let vals = m.eval(&sig.x()[seg.start..seg.end])?;
            recon[seg.start..seg.end].copy_from_slice(&vals);
        }
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,f,reconstruction")?;
    for ((x, f), r) in sig.x().iter().zip(sig.f()).zip(&recon) {
        writeln!(w, "{},{},{}", fmt_float(*x), fmt_float(*f), fmt_float(*r))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the job's inputs, compresses, and writes `summary.json`,
/// `models/segment_NNNN.json`, optionally `reconstruction.csv`, and the
/// run-dependent `timings.json`.
pub fn run_compression_job(job: &CompressionJob) -> Result<CompressionOutcome> {
    let t0 = Instant::now();
    let mut sig = ingest(&job.signal, &IngestOptions { fs: job.fs })?;
    if let Some(p) = &job.annotations {
        sig = sig.with_annotations(load_annotations(p)?)?;
    }
    let ingest_s = t0.elapsed().as_secs_f64();
    let mut out = compress_signal(&sig, &job.fit)?;
    out.timings.ingest_s = ingest_s;

    std::fs::create_dir_all(job.out.join("models"))?;
    write_json(
        &job.out.join("summary.json"),
        &SummaryFile {
            job,
            summary: &out.summary,
        },
    )?;
    for (seg, model) in out.segments.iter().zip(&out.models) {
        if let Some(m) = model {
            write_json(
                &job.out.join("models").join(format!("segment_{:04}.json", seg.index)),
                &SegmentModelFile {
                    index: seg.index,
                    start: seg.start,
                    end: seg.end,
                    model: m,
                },
            )?;
        }
    }
    if job.csv {
        write_reconstruction(&job.out.join("reconstruction.csv"), &sig, &out)?;
    }
    out.timings.total_s = t0.elapsed().as_secs_f64();
    write_json(&job.out.join("timings.json"), &out.timings)?;
    Ok(out)
}
