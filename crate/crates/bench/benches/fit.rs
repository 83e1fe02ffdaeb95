use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use freeknot::baselines::{run_baseline, BaselineConfig, BaselineMethod};
use freeknot::metrics::TestFunction;
use freeknot::pipeline::{compress_signal, FitConfig, KnotBudget};
use freeknot::varpro::linear_solve;
use freeknot::{build_design, knot_pred, vp_optimize, Norm, VpOptions};
use freeknot_bench::{ecg, one_beat, test_signal};
use std::hint::black_box;

fn prediction(c: &mut Criterion) {
    let beat = one_beat();
    let mut g = c.benchmark_group("knot_pred");
    for norm in Norm::ALL {
        g.bench_with_input(BenchmarkId::from_parameter(norm), &norm, |b, &norm| {
            b.iter(|| knot_pred(black_box(&beat), 25, 1, norm).unwrap())
        });
    }
    g.finish();
}

fn projection(c: &mut Criterion) {
    let beat = one_beat();
    let kv = knot_pred(&beat, 25, 1, Norm::L2).unwrap();
    c.bench_function("build_design", |b| b.iter(|| build_design(black_box(&kv), &beat).unwrap()));
    let bundle = build_design(&kv, &beat).unwrap();
    c.bench_function("linear_solve", |b| b.iter(|| linear_solve(black_box(&bundle), beat.f())));
}

fn refinement(c: &mut Criterion) {
    let sig = test_signal(TestFunction::F3, 101);
    let init = knot_pred(&sig, 15, 1, Norm::L2).unwrap();
    let opts = VpOptions {
        max_iter: 4,
        term_tol: 0.0,
        ..Default::default()
    };
    c.bench_function("vp_optimize/f3", |b| {
        b.iter(|| vp_optimize(black_box(&sig), &init, 3, &opts).unwrap())
    });
    c.bench_function("knot_reduction/f3", |b| {
        let cfg = BaselineConfig::new(BaselineMethod::Kr, 15);
        b.iter(|| run_baseline(black_box(&sig), &cfg).unwrap())
    });
}

fn compression(c: &mut Criterion) {
    let sig = ecg(10, 1);
    let cfg = FitConfig {
        knots: KnotBudget::Fixed { knots: 25 },
        ..Default::default()
    };
    let mut g = c.benchmark_group("compress");
    g.sample_size(10);
    g.bench_function("ecg_10_beats", |b| b.iter(|| compress_signal(black_box(&sig), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, prediction, projection, refinement, compression);
criterion_main!(benches);
