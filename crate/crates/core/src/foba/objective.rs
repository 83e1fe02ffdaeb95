use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::tables::{PrefixTables, RunningMedian};
use super::Norm;
use crate::{Error, Result};

/// Sample range between two consecutive knots `t_q = lo` and `t_{q+1} = hi`.
///
/// The span owns samples `lo..end`; `end = hi` except for the final span,
/// which also owns the last sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
    pub end: usize,
}

impl Span {
    pub fn new(lo: usize, hi: usize, n_samples: usize) -> Self {
        let end = if hi + 1 >= n_samples { n_samples } else { hi };
        Span { lo, hi, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.lo
    }

    /// Admissible split positions `[lo + δ, hi − δ]`, if any.
    pub fn candidates(&self, delta: usize) -> Option<RangeInclusive<usize>> {
        let first = self.lo + delta;
        let last = self.hi.checked_sub(delta)?;
        (first <= last && first > self.lo && last < self.end).then_some(first..=last)
    }
}

/// Best split of a span: position, resulting error, and change in error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub alpha: usize,
    pub err: f64,
    pub gain: f64,
}

/// Optimal constant for a segment: lower median, mean or midrange.
pub fn first_order_coeffs(values: &[f64], norm: Norm) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    match norm {
        Norm::L1 => {
            let mut s = values.to_vec();
            s.sort_by(f64::total_cmp);
            s[(s.len() - 1) / 2]
        }
        Norm::L2 => values.iter().sum::<f64>() / values.len() as f64,
        Norm::Linf => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            0.5 * (lo + hi)
        }
    }
}

fn segment_error(tables: &PrefixTables, lo: usize, hi: usize, norm: Norm) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let f = &tables.samples()[lo..hi];
    match norm {
        Norm::L1 => {
            let m = first_order_coeffs(f, Norm::L1);
            tables.h() * f.iter().map(|v| (v - m).abs()).sum::<f64>()
        }
        Norm::L2 => {
            let m = tables.sum(lo, hi) / (hi - lo) as f64;
            tables.h() * f.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
        }
        Norm::Linf => 0.5 * (tables.range_max(lo, hi) - tables.range_min(lo, hi)),
    }
}

/// Error of the best constant on a span.
///
/// `ℓ1`: `h Σ|f − med|`; `ℓ2`: `h Σ(f − mean)²`; `ℓ∞`: half the range.
pub fn span_error(tables: &PrefixTables, span: Span, norm: Norm) -> f64 {
    segment_error(tables, span.lo, span.end, norm)
}

fn check_alpha(span: Span, alpha: usize) -> Result<()> {
    if alpha <= span.lo || alpha >= span.end {
        return Err(Error::EmptySubspan {
            lo: span.lo,
            hi: span.end,
        });
    }
    Ok(())
}

/// Closed-form `ℓ2` objective for a split at `alpha`:
/// `−(F_L² / |L| + F_R² / |R|)` with `F` the discrete integral over each side.
pub fn e2_objective(tables: &PrefixTables, span: Span, alpha: usize) -> Result<f64> {
    check_alpha(span, alpha)?;
    let h = tables.h();
    let sl = tables.sum(span.lo, alpha);
    let sr = tables.sum(alpha, span.end);
    let nl = (alpha - span.lo) as f64;
    let nr = (span.end - alpha) as f64;
    Ok(-h * (sl * sl / nl + sr * sr / nr))
}

/// [`e2_objective`] relative to the unsplit span: the change in squared error.
pub fn e2_gain(tables: &PrefixTables, span: Span, alpha: usize) -> Result<f64> {
    check_alpha(span, alpha)?;
    let nl = (alpha - span.lo) as f64;
    let nr = (span.end - alpha) as f64;
    let ml = tables.sum(span.lo, alpha) / nl;
    let mr = tables.sum(alpha, span.end) / nr;
    let d = ml - mr;
    Ok(-tables.h() * nl * nr / (nl + nr) * d * d)
}

/// Error of the best piecewise constant with one extra knot at `alpha`.
///
/// Sum of the two sides for `ℓ1`/`ℓ2` (same units as [`span_error`]), max for `ℓ∞`.
pub fn ep_objective(tables: &PrefixTables, span: Span, alpha: usize, norm: Norm) -> Result<f64> {
    check_alpha(span, alpha)?;
    let l = segment_error(tables, span.lo, alpha, norm);
    let r = segment_error(tables, alpha, span.end, norm);
    Ok(match norm {
        Norm::Linf => l.max(r),
        _ => l + r,
    })
}

pub(crate) fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + f64::MIN_POSITIVE
}

/// Best admissible split of `span`; leftmost among ties.
pub fn best_split(tables: &PrefixTables, span: Span, delta: usize, norm: Norm) -> Option<Split> {
    let range = span.candidates(delta)?;
    let base = span_error(tables, span, norm);
    let (lo, end) = (span.lo, span.end);
    let mut best: Option<Split> = None;
    let mut consider = |alpha: usize, err: f64, gain: f64| {
        let better = match best {
            None => true,
            Some(b) => gain < b.gain && !nearly_equal(gain, b.gain),
        };
        if better {
            best = Some(Split { alpha, err, gain });
        }
    };
    match norm {
        Norm::L2 => {
            for alpha in range {
                let gain = e2_gain(tables, span, alpha).unwrap_or(0.0);
                consider(alpha, base + gain, gain);
            }
        }
        Norm::L1 => {
            let f = tables.samples();
            let h = tables.h();
            let n = end - lo;
            // left[m]: deviation of f[lo..lo+m]; right[m]: of f[end-m..end]
            let mut left = vec![0.0; n + 1];
            let mut rm = RunningMedian::default();
            for m in 1..=n {
                rm.push(f[lo + m - 1]);
                left[m] = rm.abs_dev();
            }
            let mut right = vec![0.0; n + 1];
            let mut rm = RunningMedian::default();
            for m in 1..=n {
                rm.push(f[end - m]);
                right[m] = rm.abs_dev();
            }
            for alpha in range {
                let err = h * (left[alpha - lo] + right[end - alpha]);
                consider(alpha, err, err - base);
            }
        }
        Norm::Linf => {
            let f = tables.samples();
            let n = end - lo;
            let mut left = vec![0.0; n + 1];
            let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
            for m in 1..=n {
                mn = mn.min(f[lo + m - 1]);
                mx = mx.max(f[lo + m - 1]);
                left[m] = 0.5 * (mx - mn);
            }
            let mut right = vec![0.0; n + 1];
            let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
            for m in 1..=n {
                mn = mn.min(f[end - m]);
                mx = mx.max(f[end - m]);
                right[m] = 0.5 * (mx - mn);
            }
            for alpha in range {
                let err = left[alpha - lo].max(right[end - alpha]);
                consider(alpha, err, err - base);
            }
        }
    }
    best
}
