use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::foba::ErrorCurve;
use crate::{Result, Signal, SplineModel};

/// 17 significant digits, scientific notation.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// CSV with a `sample` row per input sample and a `knot` row per knot
/// (boundaries included): `kind,x,f,reconstruction`.
pub fn emit_plot_data(model: &SplineModel, sig: &Signal, path: &Path) -> Result<()> {
    let recon = model.eval(sig.x())?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "kind,x,f,reconstruction")?;
    for ((x, f), r) in sig.x().iter().zip(sig.f()).zip(&recon) {
        writeln!(out, "sample,{},{},{}", fmt_float(*x), fmt_float(*f), fmt_float(*r))?;
    }
    let kv = &model.knots;
    let knots = std::iter::once(kv.a())
        .chain(kv.interior().iter().copied())
        .chain(std::iter::once(kv.b()));
    for t in knots {
        writeln!(out, "knot,{},,{}", fmt_float(t), fmt_float(model.value(t)))?;
    }
    out.flush()?;
    Ok(())
}

/// `knots,eps` rows of a FOBA error curve.
pub fn emit_error_curve(curve: &ErrorCurve, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "knots,eps")?;
    for (k, e) in curve.knot_counts().zip(&curve.eps) {
        writeln!(out, "{k},{}", fmt_float(*e))?;
    }
    out.flush()?;
    Ok(())
}
