use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freeknot::baselines::BaselineMethod;
use freeknot::pipeline::BenchSuite;
use freeknot::{ErrorKind, JacobianMode, Norm};

mod run;

#[derive(Parser, Debug)]
#[command(name = "freeknot", version, about = "Free-knot B-spline fitting and signal compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a test function or a synthetic ECG train to CSV.
    Synth(SynthArgs),
    /// Predict knots from a piecewise-constant fit.
    Predict(PredictArgs),
    /// Predict knots and refine them by variable projection.
    Fit(FitArgs),
    /// Fit every heartbeat of an annotated signal.
    Compress(CompressArgs),
    /// Fit with a comparison strategy (kr, uvp, rvp).
    Baseline(BaselineArgs),
    /// Run a benchmark suite and write a results table.
    Bench(BenchArgs),
    /// Export reconstruction and knot markers for a saved model.
    PlotData(PlotDataArgs),
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Signal CSV: one column (needs --fs) or two columns `x,f`.
    signal: PathBuf,
    /// Sampling rate for single-column input.
    #[arg(long)]
    fs: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct KnotArgs {
    /// Number of knots `n + 1`, boundaries included.
    #[arg(long, default_value_t = 25, conflicts_with = "auto_knots")]
    knots: usize,
    /// Pick the knot count from the knee of the prediction error curve.
    #[arg(long, requires = "tau")]
    auto_knots: bool,
    #[arg(long)]
    tau: Option<f64>,
    /// Upper limit scanned by --auto-knots.
    #[arg(long, default_value_t = 64)]
    max_knots: usize,
    #[arg(long, default_value_t = Norm::L2)]
    norm: Norm,
    /// Minimum knot spacing in samples.
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[arg(long = "normalize", overrides_with = "no_normalize")]
    _normalize: bool,
    /// Fit raw amplitudes instead of zero-mean, unit max-abs samples.
    #[arg(long, overrides_with = "_normalize")]
    no_normalize: bool,
}

#[derive(Args, Debug, Clone)]
struct VpArgs {
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long, default_value_t = 4)]
    max_iter: usize,
    #[arg(long, default_value_t = JacobianMode::Full)]
    jacobian: JacobianMode,
    /// Stop once the fitted curve moves less than this between iterations.
    #[arg(long, default_value_t = 0.1)]
    term_tol: f64,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// f1..f6, or `ecg` for a synthetic heartbeat train.
    source: String,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Uniform noise bounds `lo,hi`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    noise: Option<Vec<f64>>,
    /// Beats for `ecg`.
    #[arg(long, default_value_t = 10)]
    beats: usize,
    #[arg(long, default_value_t = 360.0)]
    fs: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    knots: KnotArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    knots: KnotArgs,
    #[command(flatten)]
    vp: VpArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CompressArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Beat annotations, one sample index per line.
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[command(flatten)]
    knots: KnotArgs,
    #[command(flatten)]
    vp: VpArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the reconstruction as CSV.
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    method: BaselineMethod,
    #[arg(long, default_value_t = 25)]
    knots: usize,
    #[command(flatten)]
    vp: VpArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = BenchSuite::Table2)]
    suite: BenchSuite,
    /// Titanium heat data as `x,f` CSV.
    #[arg(long)]
    titanium: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PlotDataArgs {
    /// Model JSON written by `fit`, `baseline` or `compress`.
    model: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Also export the prediction error curve up to this many knots.
    #[arg(long)]
    error_curve: Option<usize>,
    #[arg(long, default_value_t = Norm::L2)]
    norm: Norm,
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[arg(long)]
    out: PathBuf,
}

pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl From<freeknot::Error> for Failure {
    fn from(e: freeknot::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Config => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numerical => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: msg.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let res = match cli.command {
        Command::Synth(a) => run::synth(a),
        Command::Predict(a) => run::predict(a),
        Command::Fit(a) => run::fit(a),
        Command::Compress(a) => run::compress(a),
        Command::Baseline(a) => run::baseline(a),
        Command::Bench(a) => run::bench(a),
        Command::PlotData(a) => run::plot_data(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
