//! Predict → refine → evaluate workflow over files and beat segments.

mod bench;
mod compress;
mod fit;
mod ingest;
mod output;
mod segment;

pub use bench::{run_bench, write_bench_csv, BenchOptions, BenchRow, BenchSuite, Measure, RowStatus};
pub use compress::{
    compress_signal, run_compression_job, CompressionJob, CompressionOutcome, CompressionSummary,
    SegmentStatus, SegmentSummary, Timings,
};
pub use fit::{fit_signal, FitConfig, FitOutcome, KnotBudget, Normalization};
pub use ingest::{ingest, load_annotations, parse_annotations, parse_signal_csv, IngestOptions};
pub use output::{emit_error_curve, emit_plot_data, fmt_float, write_json};
pub use segment::{segment_beats, BeatSegment};
