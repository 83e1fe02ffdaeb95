use serde::{Deserialize, Serialize};

use crate::{Error, Result, Signal};

/// Samples `start..end` around one annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeatSegment {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    /// Sample index of the annotation the segment is built around.
    pub annotation: Option<usize>,
    /// Set when the segment is shorter than the requested minimum.
    pub skipped: Option<String>,
}

impl BeatSegment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn view(&self, sig: &Signal) -> Result<Signal> {
        sig.slice(self.start, self.end)
    }
}

/// Splits at midpoints between consecutive annotations; the first segment
/// starts at sample 0 and the last ends at `N`. Segments with fewer than
/// `min_len` samples are flagged as skipped.
pub fn segment_beats(sig: &Signal, min_len: usize) -> Result<Vec<BeatSegment>> {
    let ann = sig.annotations().unwrap_or(&[]);
    if ann.len() < 2 {
        return Err(Error::Data(format!(
            "beat segmentation needs at least 2 annotations, found {}",
            ann.len()
        )));
    }
    let mut bounds = vec![0];
    bounds.extend(ann.windows(2).map(|w| (w[0] + w[1]) / 2));
    bounds.push(sig.len());
    Ok(bounds
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let len = w[1] - w[0];
            BeatSegment {
                index: i,
                start: w[0],
                end: w[1],
                annotation: Some(ann[i]),
                skipped: (len < min_len)
                    .then(|| format!("{len} samples, need at least {min_len}")),
            }
        })
        .collect())
}
