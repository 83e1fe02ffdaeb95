use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, KnotVector, Result};

const MAX_ATTEMPTS: usize = 10_000;

/// `n` equal intervals on `[a, b]`, as a degree-0 knot vector.
pub fn uniform_init(a: f64, b: f64, n: usize) -> Result<KnotVector> {
    if n < 1 {
        return Err(Error::Config("need at least one interval".into()));
    }
    KnotVector::uniform(0, a, b, n + 1)
}

/// `n − 1` sorted uniform-random interior knots with every gap (boundaries
/// included) at least `delta`, as a degree-0 knot vector.
pub fn random_init(a: f64, b: f64, n: usize, delta: f64, seed: u64) -> Result<KnotVector> {
    if n < 1 {
        return Err(Error::Config("need at least one interval".into()));
    }
    if !(a < b) || !(delta >= 0.0) {
        return Err(Error::Config(format!("invalid domain [{a}, {b}] or delta {delta}")));
    }
    if n as f64 * delta > b - a {
        return Err(Error::Infeasible(format!(
            "{n} intervals of at least {delta} do not fit [{a}, {b}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut interior: Vec<f64> = (0..n - 1).map(|_| rng.random_range(a..b)).collect();
        interior.sort_by(f64::total_cmp);
        let mut prev = a;
        let ok = interior.iter().chain(std::iter::once(&b)).all(|&x| {
            let good = x - prev >= delta && x > prev;
            prev = x;
            good
        });
        if ok {
            return KnotVector::new(0, a, b, interior);
        }
    }
    Err(Error::Infeasible(format!(
        "no admissible random knots after {MAX_ATTEMPTS} attempts"
    )))
}
