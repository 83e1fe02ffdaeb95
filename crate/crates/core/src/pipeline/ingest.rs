use std::io::Read;
use std::path::Path;

use crate::{Error, Result, Signal};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IngestOptions {
    /// Sampling rate for single-column input.
    pub fs: Option<f64>,
}

/// Reads `(t, f)` rows, or single `f` rows with `opts.fs`. A non-numeric
/// first row is taken as a header.
pub fn parse_signal_csv<R: Read>(reader: R, opts: &IngestOptions) -> Result<Signal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|s| s.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if line == 0 => continue,
            Err(_) => return Err(Error::Data(format!("malformed row {}: {:?}", line + 1, rec))),
        }
    }
    let width = rows.first().map(Vec::len).unwrap_or(0);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(Error::Data(format!(
            "row {} has {} columns, expected {width}",
            i + 1,
            r.len()
        )));
    }
    match width {
        0 => Err(Error::Data("no samples".into())),
        1 => {
            let fs = opts
                .fs
                .ok_or_else(|| Error::Config("single-column input needs a sampling rate".into()))?;
            if !(fs > 0.0) || !fs.is_finite() {
                return Err(Error::Config(format!("invalid sampling rate {fs}")));
            }
            let f: Vec<f64> = rows.into_iter().map(|r| r[0]).collect();
            let x = (0..f.len()).map(|i| i as f64 / fs).collect();
            Signal::new(x, f)
        }
        2 => {
            let (x, f) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
            Signal::new(x, f)
        }
        w => Err(Error::Data(format!("expected 1 or 2 columns, found {w}"))),
    }
}

pub fn ingest(path: &Path, opts: &IngestOptions) -> Result<Signal> {
    let file = std::fs::File::open(path)?;
    parse_signal_csv(std::io::BufReader::new(file), opts)
}

/// One sample index per line, strictly ascending.
pub fn parse_annotations(text: &str) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: usize = line
            .parse()
            .map_err(|_| Error::Data(format!("annotation line {}: '{line}' is not an index", i + 1)))?;
        if let Some(&last) = out.last() {
            if v <= last {
                return Err(Error::Data(format!(
                    "annotation line {}: {v} does not follow {last}",
                    i + 1
                )));
            }
        }
        out.push(v);
    }
    Ok(out)
}

pub fn load_annotations(path: &Path) -> Result<Vec<usize>> {
    parse_annotations(&std::fs::read_to_string(path)?)
}
