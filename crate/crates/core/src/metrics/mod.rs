//! Error measures, compression ratio, synthetic test functions and signals.

mod ecg;
mod errors;
mod testfns;

pub use ecg::{synthetic_ecg, EcgConfig};
pub use errors::{compression_ratio, error_report, prdn, relative_error, ErrorReport};
pub use testfns::{add_noise, load_titanium, sample_test_function, test_function, TestFunction};
