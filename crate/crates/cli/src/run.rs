use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use freeknot::baselines::{run_baseline, BaselineConfig};
use freeknot::foba::{estimate_knot_count, foba_error_curve, knot_pred_trace};
use freeknot::metrics::{add_noise, sample_test_function, synthetic_ecg, EcgConfig, TestFunction};
use freeknot::pipeline::{
    emit_error_curve, emit_plot_data, fit_signal, fmt_float, ingest, run_bench,
    run_compression_job, write_bench_csv, write_json, BenchOptions, CompressionJob, FitConfig,
    IngestOptions, KnotBudget, Normalization, RowStatus,
};
use freeknot::{Signal, SplineModel, VpOptions};
use serde_json::json;

use crate::{
    BaselineArgs, BenchArgs, CompressArgs, Failure, FitArgs, InputArgs, KnotArgs, PlotDataArgs,
    PredictArgs, SynthArgs, VpArgs,
};

type Res = std::result::Result<(), Failure>;

fn load(input: &InputArgs) -> Result<Signal, Failure> {
    Ok(ingest(&input.signal, &IngestOptions { fs: input.fs })?)
}

fn create_out(dir: &Path) -> Res {
    fs::create_dir_all(dir).map_err(|e| Failure::from(freeknot::Error::from(e)))
}

impl KnotArgs {
    fn budget(&self) -> Result<KnotBudget, Failure> {
        if self.auto_knots {
            let tau = self.tau.ok_or_else(|| Failure::config("--auto-knots needs --tau"))?;
            Ok(KnotBudget::Auto {
                tau,
                max_knots: self.max_knots,
            })
        } else {
            Ok(KnotBudget::Fixed { knots: self.knots })
        }
    }
}

impl VpArgs {
    fn options(&self) -> VpOptions {
        VpOptions {
            max_iter: self.max_iter,
            mode: self.jacobian,
            term_tol: self.term_tol,
            ..Default::default()
        }
    }
}

fn fit_config(k: &KnotArgs, vp: &VpArgs) -> Result<FitConfig, Failure> {
    Ok(FitConfig {
        norm: k.norm,
        knots: k.budget()?,
        degree: vp.degree,
        delta: k.delta,
        vp: vp.options(),
        normalize: !k.no_normalize,
    })
}

fn write_signal_csv(path: &Path, sig: &Signal) -> Res {
    let mut s = String::from("x,f\n");
    for (x, f) in sig.x().iter().zip(sig.f()) {
        s.push_str(&format!("{},{}\n", fmt_float(*x), fmt_float(*f)));
    }
    fs::write(path, s).map_err(|e| freeknot::Error::from(e).into())
}

pub(crate) fn synth(a: SynthArgs) -> Res {
    create_out(&a.out)?;
    let sig = if a.source.eq_ignore_ascii_case("ecg") {
        if a.noise.is_some() {
            return Err(Failure::config("--noise applies to test functions only"));
        }
        synthetic_ecg(&EcgConfig {
            beats: a.beats,
            fs: a.fs,
            seed: a.seed,
            ..Default::default()
        })?
    } else {
        let id: TestFunction = a.source.parse()?;
        let sig = sample_test_function(id, a.samples)?;
        match a.noise.as_deref() {
            Some([lo, hi]) => add_noise(&sig, *lo, *hi, a.seed)?,
            Some(_) => return Err(Failure::config("--noise takes two bounds, lo,hi")),
            None => sig,
        }
    };
    write_signal_csv(&a.out.join("signal.csv"), &sig)?;
    if let Some(ann) = sig.annotations() {
        let text: String = ann.iter().map(|i| format!("{i}\n")).collect();
        fs::write(a.out.join("annotations.txt"), text).map_err(freeknot::Error::from)?;
    }
    println!("wrote {} samples to {}", sig.len(), a.out.display());
    Ok(())
}

pub(crate) fn predict(a: PredictArgs) -> Res {
    let sig = load(&a.input)?;
    create_out(&a.out)?;
    let norm = if a.knots.no_normalize {
        Normalization::IDENTITY
    } else {
        Normalization::of(sig.f())
    };
    let work = sig.with_samples(norm.apply(sig.f()))?;
    let n_knots = match a.knots.budget()? {
        KnotBudget::Fixed { knots } => knots,
        KnotBudget::Auto { tau, max_knots } => {
            let room = (work.len() - 1) / a.knots.delta.max(1) + 1;
            let curve = foba_error_curve(&work, max_knots.min(room).max(2), a.knots.delta, a.knots.norm)?;
            emit_error_curve(&curve, &a.out.join("error_curve.csv"))?;
            estimate_knot_count(&curve, tau)
        }
    };
    let pred = knot_pred_trace(&work, n_knots, a.knots.delta, a.knots.norm)?;
    write_json(
        &a.out.join("knots.json"),
        &json!({
            "norm": a.knots.norm,
            "delta": a.knots.delta,
            "n_knots": pred.knots.n_knots(),
            "indices": pred.indices,
            "interior": pred.knots.interior(),
            "a": pred.knots.a(),
            "b": pred.knots.b(),
            "totals": pred.totals.iter().map(|t| t * norm.scale.powi(match a.knots.norm {
                freeknot::Norm::L2 => 2,
                _ => 1,
            })).collect::<Vec<_>>(),
        }),
    )?;
    println!("{} knots at indices {:?}", pred.knots.n_knots(), pred.indices);
    Ok(())
}

pub(crate) fn fit(a: FitArgs) -> Res {
    let t0 = Instant::now();
    let sig = load(&a.input)?;
    let cfg = fit_config(&a.knots, &a.vp)?;
    let out = fit_signal(&sig, &cfg)?;
    create_out(&a.out)?;
    write_json(&a.out.join("model.json"), &out.model)?;
    write_json(&a.out.join("report.json"), &json!({ "config": cfg, "fit": out }))?;
    emit_plot_data(&out.model, &sig, &a.out.join("plot.csv"))?;
    write_json(
        &a.out.join("timings.json"),
        &json!({
            "predict_s": out.foba_time.as_secs_f64(),
            "refine_s": out.vp_time.as_secs_f64(),
            "total_s": t0.elapsed().as_secs_f64(),
        }),
    )?;
    let e = &out.report.errors;
    println!(
        "knots {}  iterations {}  prdn {}  mse {:.6e}  cr {:.4}",
        out.model.knots.n_knots(),
        out.report.iterations,
        e.eps2.map_or("undefined".into(), |p| format!("{p:.4}%")),
        e.mse,
        out.report.cr
    );
    Ok(())
}

pub(crate) fn compress(a: CompressArgs) -> Res {
    let job = CompressionJob {
        signal: a.input.signal.clone(),
        annotations: a.annotations.clone(),
        fs: a.input.fs,
        fit: fit_config(&a.knots, &a.vp)?,
        seed: a.seed,
        out: a.out.clone(),
        csv: a.csv,
    };
    let out = run_compression_job(&job)?;
    let s = &out.summary;
    println!(
        "beats {}  fitted {}  skipped {}  failed {}  cr {:.4}  prdn {}",
        s.beats,
        s.fitted,
        s.skipped,
        s.failed,
        s.cr,
        s.prdn.map_or("undefined".into(), |p| format!("{p:.4}%"))
    );
    Ok(())
}

pub(crate) fn baseline(a: BaselineArgs) -> Res {
    let t0 = Instant::now();
    let sig = load(&a.input)?;
    let mut cfg = BaselineConfig::new(a.method, a.knots);
    cfg.degree = a.vp.degree;
    cfg.vp = a.vp.options();
    cfg.seed = Some(a.seed);
    let res = run_baseline(&sig, &cfg)?;
    create_out(&a.out)?;
    write_json(&a.out.join("model.json"), &res.model)?;
    write_json(&a.out.join("report.json"), &res)?;
    emit_plot_data(&res.model, &sig, &a.out.join("plot.csv"))?;
    write_json(&a.out.join("timings.json"), &json!({ "total_s": t0.elapsed().as_secs_f64() }))?;
    println!(
        "{}  knots {}  prdn {}  mse {:.6e}",
        a.method,
        res.model.knots.n_knots(),
        res.errors.eps2.map_or("undefined".into(), |p| format!("{p:.4}%")),
        res.errors.mse
    );
    Ok(())
}

pub(crate) fn bench(a: BenchArgs) -> Res {
    let rows = run_bench(
        a.suite,
        &BenchOptions {
            seed: a.seed,
            titanium: a.titanium.clone(),
        },
    )?;
    create_out(&a.out)?;
    write_bench_csv(&rows, &a.out.join("bench.csv"), Some(&a.out.join("timings.csv")))?;
    let mut so = std::io::stdout().lock();
    for r in &rows {
        let value = r.value.map_or("-".into(), |v| format!("{v:.6}"));
        let target = r.target.map_or("-".into(), |v| format!("{v}"));
        let note = match r.status {
            RowStatus::Ok => String::new(),
            _ => format!("  [{:?}: {}]", r.status, r.reason.as_deref().unwrap_or("")),
        };
        let _ = writeln!(
            so,
            "{:<4} {:<12} N={:<5} knots={:<3} {:<5} {:>14} target {}{}",
            r.case, r.method, r.n_samples, r.n_knots, r.measure, value, target, note
        );
    }
    Ok(())
}

pub(crate) fn plot_data(a: PlotDataArgs) -> Res {
    let sig = load(&a.input)?;
    let text = fs::read_to_string(&a.model).map_err(freeknot::Error::from)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(freeknot::Error::from)?;
    // Accept a bare model or any wrapper with a `model` field.
    let inner = value.get("model").cloned().unwrap_or(value);
    let model: SplineModel = serde_json::from_value(inner).map_err(freeknot::Error::from)?;
    create_out(&a.out)?;
    emit_plot_data(&model, &sig, &a.out.join("plot.csv"))?;
    if let Some(max) = a.error_curve {
        let curve = foba_error_curve(&sig, max, a.delta, a.norm)?;
        emit_error_curve(&curve, &a.out.join("error_curve.csv"))?;
    }
    println!("wrote plot data to {}", a.out.display());
    Ok(())
}
