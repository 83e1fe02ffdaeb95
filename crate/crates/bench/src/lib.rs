//! Fixtures shared by the criterion benches.

use freeknot::metrics::{sample_test_function, synthetic_ecg, EcgConfig, TestFunction};
use freeknot::pipeline::segment_beats;
use freeknot::Signal;

/// A sampled test function.
pub fn test_signal(id: TestFunction, n: usize) -> Signal {
    sample_test_function(id, n).expect("test function")
}

/// A synthetic annotated ECG train.
pub fn ecg(beats: usize, seed: u64) -> Signal {
    synthetic_ecg(&EcgConfig {
        beats,
        seed,
        ..Default::default()
    })
    .expect("synthetic ecg")
}

/// The first heartbeat of a synthetic train.
pub fn one_beat() -> Signal {
    let sig = ecg(3, 7);
    let segs = segment_beats(&sig, 60).expect("segments");
    segs[1].view(&sig).expect("beat")
}
