use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Prefix sums and range min/max tables over a sample vector.
#[derive(Debug, Clone)]
pub struct PrefixTables {
    h: f64,
    f: Vec<f64>,
    sums: Vec<f64>,
    min_table: Vec<Vec<f64>>,
    max_table: Vec<Vec<f64>>,
}

fn sparse_table(f: &[f64], pick: fn(f64, f64) -> f64) -> Vec<Vec<f64>> {
    let mut levels = vec![f.to_vec()];
    let mut w = 1;
    while 2 * w <= f.len() {
        let prev = levels.last().unwrap();
        let next: Vec<f64> = (0..=f.len() - 2 * w)
            .map(|i| pick(prev[i], prev[i + w]))
            .collect();
        levels.push(next);
        w *= 2;
    }
    levels
}

impl PrefixTables {
    pub fn new(f: &[f64], h: f64) -> Self {
        let mut sums = Vec::with_capacity(f.len() + 1);
        sums.push(0.0);
        let mut acc = 0.0;
        for &v in f {
            acc += v;
            sums.push(acc);
        }
        PrefixTables {
            h,
            f: f.to_vec(),
            sums,
            min_table: sparse_table(f, f64::min),
            max_table: sparse_table(f, f64::max),
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.f
    }

    /// `Σ_{lo ≤ k < hi} f_k`.
    pub fn sum(&self, lo: usize, hi: usize) -> f64 {
        self.sums[hi] - self.sums[lo]
    }

    /// Discrete antiderivative `h · Σ_{lo ≤ k < hi} f_k`.
    pub fn integral(&self, lo: usize, hi: usize) -> f64 {
        self.h * self.sum(lo, hi)
    }

    fn level(&self, lo: usize, hi: usize) -> (usize, usize) {
        let len = hi - lo;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        (k, 1 << k)
    }

    /// Minimum over `lo..hi` (non-empty).
    pub fn range_min(&self, lo: usize, hi: usize) -> f64 {
        let (k, w) = self.level(lo, hi);
        self.min_table[k][lo].min(self.min_table[k][hi - w])
    }

    /// Maximum over `lo..hi` (non-empty).
    pub fn range_max(&self, lo: usize, hi: usize) -> f64 {
        let (k, w) = self.level(lo, hi);
        self.max_table[k][lo].max(self.max_table[k][hi - w])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Running lower median and sum of absolute deviations from it.
#[derive(Debug, Default)]
pub(crate) struct RunningMedian {
    lower: BinaryHeap<Key>,
    upper: BinaryHeap<std::cmp::Reverse<Key>>,
    lower_sum: f64,
    upper_sum: f64,
}

impl RunningMedian {
    pub fn push(&mut self, v: f64) {
        match self.lower.peek() {
            Some(top) if v > top.0 => {
                self.upper.push(std::cmp::Reverse(Key(v)));
                self.upper_sum += v;
            }
            _ => {
                self.lower.push(Key(v));
                self.lower_sum += v;
            }
        }
        // keep |lower| = ceil(m / 2)
        if self.lower.len() > self.upper.len() + 1 {
            let Key(x) = self.lower.pop().unwrap();
            self.lower_sum -= x;
            self.upper.push(std::cmp::Reverse(Key(x)));
            self.upper_sum += x;
        } else if self.upper.len() > self.lower.len() {
            let std::cmp::Reverse(Key(x)) = self.upper.pop().unwrap();
            self.upper_sum -= x;
            self.lower.push(Key(x));
            self.lower_sum += x;
        }
    }

    pub fn median(&self) -> f64 {
        self.lower.peek().map(|k| k.0).unwrap_or(0.0)
    }

    /// `Σ |v - median|` over the pushed values.
    pub fn abs_dev(&self) -> f64 {
        let m = self.median();
        let d = (m * self.lower.len() as f64 - self.lower_sum)
            + (self.upper_sum - m * self.upper.len() as f64);
        d.max(0.0)
    }
}
