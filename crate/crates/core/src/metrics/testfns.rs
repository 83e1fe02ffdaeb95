use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Signal};

/// Synthetic benchmark functions `f1`..`f6`; `f2` is the titanium heat data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
}

impl TestFunction {
    pub const ALL: [TestFunction; 6] = [
        TestFunction::F1,
        TestFunction::F2,
        TestFunction::F3,
        TestFunction::F4,
        TestFunction::F5,
        TestFunction::F6,
    ];

    pub fn domain(self) -> (f64, f64) {
        match self {
            TestFunction::F5 => (0.0, 10.0),
            TestFunction::F2 => (595.0, 1075.0),
            _ => (0.0, 1.0),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize + 1;
        write!(f, "f{i}")
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestFunction::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown test function '{s}'")))
    }
}

pub fn test_function(id: TestFunction, x: f64) -> Result<f64> {
    let (a, b) = id.domain();
    if id == TestFunction::F2 {
        return Err(Error::MissingData(
            "f2 is tabulated data; load it with load_titanium".into(),
        ));
    }
    if !(a..=b).contains(&x) {
        return Err(Error::Domain { x, a, b });
    }
    Ok(match id {
        TestFunction::F1 => (2.0 * std::f64::consts::PI * x.powi(3)).sin().powi(3),
        TestFunction::F3 => 90.0 / (1.0 + (-100.0 * (x - 0.4)).exp()),
        TestFunction::F4 => {
            let g = |c: f64, w: f64| (-(x - c).powi(2) / w).exp();
            (1.5 * g(0.1, 0.3) + 0.1 * g(0.5, 2.0) + 2.0 * g(0.8, 0.02)) / 2.3935
        }
        TestFunction::F5 => 100.0 / (x - 5.0).abs().exp() + (x - 5.0).powi(5) / 500.0,
        TestFunction::F6 => {
            if x < 0.6 {
                1.0 / (0.01 + (x - 0.3).powi(2))
            } else {
                1.0 / (0.015 + (x - 0.65).powi(2))
            }
        }
        TestFunction::F2 => unreachable!(),
    })
}

/// `n` equispaced samples of a test function over its domain.
pub fn sample_test_function(id: TestFunction, n: usize) -> Result<Signal> {
    let (a, b) = id.domain();
    let x = Signal::sample_fn(a, b, n, |x| x)?.f().to_vec();
    let f = x
        .iter()
        .map(|&x| test_function(id, x))
        .collect::<Result<Vec<_>>>()?;
    Signal::new(x, f)
}

/// Two-column `(t, f)` CSV of the titanium heat data (header optional).
pub fn load_titanium(path: &Path) -> Result<Signal> {
    if !path.exists() {
        return Err(Error::MissingData(format!("{} not found", path.display())));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let (mut x, mut f) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let parsed: Vec<f64> = rec.iter().filter_map(|s| s.parse().ok()).collect();
        match parsed.as_slice() {
            [t, v] => {
                x.push(*t);
                f.push(*v);
            }
            _ if x.is_empty() => continue,
            _ => return Err(Error::Data(format!("malformed row {:?}", rec))),
        }
    }
    Signal::new(x, f)
}

/// Adds i.i.d. uniform `[lo, hi]` noise drawn from a seeded ChaCha8 stream.
pub fn add_noise(sig: &Signal, lo: f64, hi: f64, seed: u64) -> Result<Signal> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!("invalid noise interval [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = sig
        .f()
        .iter()
        .map(|v| if lo == hi { v + lo } else { v + rng.random_range(lo..=hi) })
        .collect();
    sig.with_samples(f)
}
