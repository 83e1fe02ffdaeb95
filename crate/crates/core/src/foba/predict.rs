use serde::{Deserialize, Serialize};

use super::objective::{best_split, nearly_equal, span_error, Span, Split};
use super::tables::PrefixTables;
use super::Norm;
use crate::{Error, KnotVector, Result, Signal};

/// One span of the current partition with its best pending split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub span: Span,
    pub span_err: f64,
    pub split: Option<Split>,
}

/// Per-span candidates after the last insertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub norm: Norm,
    pub delta: usize,
    pub entries: Vec<Candidate>,
}

impl CandidateSet {
    /// Total error of the current piecewise constant.
    pub fn total(&self) -> f64 {
        let errs = self.entries.iter().map(|c| c.span_err);
        match self.norm {
            Norm::Linf => errs.fold(0.0, f64::max),
            _ => errs.sum(),
        }
    }

    /// Total error if candidate `j` were inserted.
    pub fn total_if_inserted(&self, j: usize) -> Option<f64> {
        let split = self.entries[j].split?;
        Some(match self.norm {
            Norm::Linf => self
                .entries
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, c)| c.span_err)
                .fold(split.err, f64::max),
            _ => self.total() + split.gain,
        })
    }

    /// Index of the candidate to insert next.
    fn select(&self) -> Option<usize> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.entries.len() {
            let Some(split) = self.entries[j].split else {
                continue;
            };
            let key = match self.norm {
                Norm::Linf => self.total_if_inserted(j).unwrap(),
                _ => split.gain,
            };
            let better = match best {
                None => true,
                Some((_, bk, bg)) => {
                    if nearly_equal(key, bk) {
                        split.gain < bg && !nearly_equal(split.gain, bg)
                    } else {
                        key < bk
                    }
                }
            };
            if better {
                best = Some((j, key, split.gain));
            }
        }
        best.map(|b| b.0)
    }
}

/// Result of greedy knot prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotPrediction {
    /// Knot sample indices, boundaries included, ascending.
    pub indices: Vec<usize>,
    /// Degree-0 knot vector on the signal's abscissae.
    pub knots: KnotVector,
    /// Total error after each insertion; `totals[0]` has no interior knots.
    pub totals: Vec<f64>,
    pub candidates: CandidateSet,
}

fn make_candidate(tables: &PrefixTables, span: Span, delta: usize, norm: Norm) -> Candidate {
    Candidate {
        span,
        span_err: span_error(tables, span, norm),
        split: best_split(tables, span, delta, norm),
    }
}

fn validate(sig: &Signal, n_knots: usize, delta: usize) -> Result<()> {
    if n_knots < 2 {
        return Err(Error::Config(format!("need at least 2 knots, got {n_knots}")));
    }
    if delta == 0 {
        return Err(Error::Config("delta must be at least 1".into()));
    }
    let n = n_knots - 1;
    if n * delta > sig.len() - 1 {
        return Err(Error::Infeasible(format!(
            "{n_knots} knots with spacing {delta} do not fit {} samples",
            sig.len()
        )));
    }
    Ok(())
}

/// Greedy first-order knot prediction with the full trace.
pub fn knot_pred_trace(sig: &Signal, n_knots: usize, delta: usize, norm: Norm) -> Result<KnotPrediction> {
    validate(sig, n_knots, delta)?;
    let big_n = sig.len();
    let tables = PrefixTables::new(sig.f(), sig.h());
    let mut indices = vec![0, big_n - 1];
    let mut set = CandidateSet {
        norm,
        delta,
        entries: vec![make_candidate(&tables, Span::new(0, big_n - 1, big_n), delta, norm)],
    };
    let mut totals = vec![set.total()];
    while indices.len() < n_knots {
        let j = set.select().ok_or_else(|| {
            Error::Infeasible(format!(
                "no admissible split left after {} knots",
                indices.len()
            ))
        })?;
        let span = set.entries[j].span;
        let alpha = set.entries[j].split.unwrap().alpha;
        indices.insert(j + 1, alpha);
        let left = make_candidate(&tables, Span::new(span.lo, alpha, big_n), delta, norm);
        let right = make_candidate(&tables, Span::new(alpha, span.hi, big_n), delta, norm);
        set.entries.splice(j..=j, [left, right]);
        totals.push(set.total());
    }
    let xs = sig.x();
    let interior: Vec<f64> = indices[1..indices.len() - 1].iter().map(|&i| xs[i]).collect();
    let knots = KnotVector::new(0, sig.a(), sig.b(), interior)?;
    Ok(KnotPrediction {
        indices,
        knots,
        totals,
        candidates: set,
    })
}

/// Greedy first-order knot prediction: `n_knots` knots including both
/// boundaries, at least `delta` samples apart. Returns a degree-0 knot vector.
pub fn knot_pred(sig: &Signal, n_knots: usize, delta: usize, norm: Norm) -> Result<KnotVector> {
    knot_pred_trace(sig, n_knots, delta, norm).map(|p| p.knots)
}

/// Relative first-order error `ε_p` (percent) against knot count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub norm: Norm,
    /// `eps[i]` belongs to `i + 2` knots.
    pub eps: Vec<f64>,
}

impl ErrorCurve {
    pub fn knot_counts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.eps.len()).map(|i| i + 2)
    }
}

fn reference_error(sig: &Signal, norm: Norm) -> f64 {
    let f = sig.f();
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    let h = sig.h();
    match norm {
        Norm::L1 => h * f.iter().map(|v| (v - mean).abs()).sum::<f64>(),
        Norm::L2 => h * f.iter().map(|v| (v - mean).powi(2)).sum::<f64>(),
        Norm::Linf => f.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max),
    }
}

/// `ε_p` after each greedy insertion, from 2 up to `max_knots` knots.
/// Constant signals give an all-zero curve.
pub fn foba_error_curve(sig: &Signal, max_knots: usize, delta: usize, norm: Norm) -> Result<ErrorCurve> {
    let pred = knot_pred_trace(sig, max_knots, delta, norm)?;
    let denom = reference_error(sig, norm);
    let eps = pred
        .totals
        .iter()
        .map(|&t| {
            if denom == 0.0 {
                0.0
            } else if norm == Norm::L2 {
                100.0 * (t.max(0.0) / denom).sqrt()
            } else {
                100.0 * t / denom
            }
        })
        .collect();
    Ok(ErrorCurve { norm, eps })
}

/// Knee of an error curve: the first `k` where adding three more knots
/// improves `ε` by at most `tau · ε_{k+3}`. Falls back to the largest count.
pub fn estimate_knot_count(curve: &ErrorCurve, tau: f64) -> usize {
    let e = &curve.eps;
    for k in 3..e.len() {
        if e[k - 3] - e[k] <= tau * e[k] {
            return k - 3 + 2;
        }
    }
    e.len() + 1
}
