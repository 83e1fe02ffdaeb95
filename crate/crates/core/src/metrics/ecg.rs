use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Signal};

/// Quasi-periodic ECG-like train built from Gaussian P, Q, R, S, T waves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcgConfig {
    pub beats: usize,
    /// Sampling rate in Hz.
    pub fs: f64,
    pub bpm: f64,
    /// Relative RR-interval jitter, uniform in `±rr_jitter`.
    pub rr_jitter: f64,
    /// Relative wave-amplitude jitter, uniform in `±amp_jitter`.
    pub amp_jitter: f64,
    /// Additive noise, uniform in `±noise`.
    pub noise: f64,
    pub seed: u64,
}

impl Default for EcgConfig {
    fn default() -> Self {
        EcgConfig {
            beats: 10,
            fs: 360.0,
            bpm: 72.0,
            rr_jitter: 0.05,
            amp_jitter: 0.1,
            noise: 0.01,
            seed: 0,
        }
    }
}

// (amplitude, offset from R in s, width in s)
const WAVES: [(f64, f64, f64); 5] = [
    (0.15, -0.20, 0.025),
    (-0.15, -0.035, 0.010),
    (1.00, 0.0, 0.012),
    (-0.25, 0.035, 0.010),
    (0.30, 0.25, 0.040),
];

/// Samples an ECG-like train; annotations mark the R peaks.
pub fn synthetic_ecg(cfg: &EcgConfig) -> Result<Signal> {
    if cfg.beats == 0 || !(cfg.fs > 0.0) || !(cfg.bpm > 0.0) {
        return Err(Error::Config("ECG needs beats > 0, fs > 0 and bpm > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jitter = |scale: f64| {
        if scale > 0.0 {
            rng.random_range(-scale..=scale)
        } else {
            0.0
        }
    };
    let rr0 = 60.0 / cfg.bpm;
    let mut peaks = Vec::with_capacity(cfg.beats);
    let mut amps = Vec::with_capacity(cfg.beats);
    let mut t = 0.0;
    let mut prev = rr0;
    for _ in 0..cfg.beats {
        let rr = rr0 * (1.0 + jitter(cfg.rr_jitter));
        t += 0.5 * (prev + rr);
        prev = rr;
        peaks.push(t);
        amps.push(WAVES.map(|w| w.0 * (1.0 + jitter(cfg.amp_jitter))));
    }
    let duration = t + 0.5 * prev + 0.5 * rr0;
    let n = (duration * cfg.fs).round() as usize + 1;
    let h = 1.0 / cfg.fs;
    let mut f = vec![0.0; n];
    for (i, v) in f.iter_mut().enumerate() {
        let x = i as f64 * h;
        for (p, a) in peaks.iter().zip(&amps) {
            if (x - p).abs() > 1.0 {
                continue;
            }
            for (w, amp) in WAVES.iter().zip(a) {
                let d = (x - p - w.1) / w.2;
                *v += amp * (-0.5 * d * d).exp();
            }
        }
        *v += jitter(cfg.noise);
    }
    let ann = peaks.iter().map(|p| (p * cfg.fs).round() as usize).collect();
    Signal::uniform(0.0, h, f)?.with_annotations(ann)
}
