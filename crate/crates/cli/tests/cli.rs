use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn freeknot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeknot"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) {
    let o = freeknot(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(freeknot(&["--help"]).status.code(), Some(0));
    assert_eq!(freeknot(&["--version"]).status.code(), Some(0));
    assert_eq!(freeknot(&["fit", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(freeknot(&[]).status.code(), Some(1));
    assert_eq!(freeknot(&["fit", "--bogus"]).status.code(), Some(1));
    assert_eq!(freeknot(&["fit", "x.csv", "--norm", "l3", "--out", "o"]).status.code(), Some(1));
    assert_eq!(
        freeknot(&["fit", "x.csv", "--knots", "9", "--auto-knots", "--tau", "0.1", "--out", "o"]).status.code(),
        Some(1)
    );
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "f3", "--samples", "101", "--out", p(&d.join("f3"))]);
    let sig = d.join("f3/signal.csv");
    // Missing file: data.
    let o = freeknot(&["fit", p(&d.join("none.csv")), "--out", p(&d.join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    // Malformed row: data.
    fs::write(d.join("bad.csv"), "0,1\n1,abc\n").unwrap();
    let o = freeknot(&["fit", p(&d.join("bad.csv")), "--out", p(&d.join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    // One column without a sampling rate: configuration.
    fs::write(d.join("one.csv"), "1\n2\n3\n").unwrap();
    let o = freeknot(&["fit", p(&d.join("one.csv")), "--out", p(&d.join("x"))]);
    assert_eq!(o.status.code(), Some(1));
    // Too few knots: configuration.
    let o = freeknot(&["fit", p(&sig), "--knots", "1", "--out", p(&d.join("x"))]);
    assert_eq!(o.status.code(), Some(1));
    // More knots than the samples support: numerical.
    let o = freeknot(&["fit", p(&sig), "--knots", "100", "--out", p(&d.join("x"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn fit_then_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "f4", "--samples", "200", "--noise=-0.05,0.05", "--seed", "1", "--out", p(&d.join("s"))]);
    let sig = d.join("s/signal.csv");
    ok(&["fit", p(&sig), "--knots", "15", "--norm", "l1", "--no-normalize", "--out", p(&d.join("fit"))]);
    for f in ["model.json", "report.json", "plot.csv", "timings.json"] {
        assert!(d.join("fit").join(f).exists(), "{f}");
    }
    ok(&[
        "plot-data",
        p(&d.join("fit/model.json")),
        p(&sig),
        "--error-curve",
        "30",
        "--out",
        p(&d.join("plot")),
    ]);
    let plot = fs::read_to_string(d.join("plot/plot.csv")).unwrap();
    assert_eq!(plot.lines().filter(|l| l.starts_with("knot,")).count(), 15);
    assert_eq!(plot.lines().filter(|l| l.starts_with("sample,")).count(), 200);
    let curve = fs::read_to_string(d.join("plot/error_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 29);
}

#[test]
fn compress_writes_models_per_beat() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "ecg", "--beats", "5", "--seed", "3", "--out", p(&d.join("e"))]);
    ok(&[
        "compress",
        p(&d.join("e/signal.csv")),
        "--annotations",
        p(&d.join("e/annotations.txt")),
        "--knots",
        "20",
        "--out",
        p(&d.join("c")),
    ]);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("c/summary.json")).unwrap()).unwrap();
    let beats = summary["beats"].as_u64().unwrap();
    assert_eq!(beats, 5);
    let models = fs::read_dir(d.join("c/models")).unwrap().count() as u64;
    assert_eq!(models, summary["fitted"].as_u64().unwrap());
    assert!(!d.join("c/reconstruction.csv").exists());
}

#[test]
fn predict_baseline_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "f6", "--out", p(&d.join("s"))]);
    let sig = d.join("s/signal.csv");
    ok(&["predict", p(&sig), "--knots", "10", "--norm", "linf", "--out", p(&d.join("p"))]);
    let knots: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("p/knots.json")).unwrap()).unwrap();
    assert_eq!(knots["indices"].as_array().unwrap().len(), 10);
    for m in ["kr", "uvp", "rvp"] {
        ok(&["baseline", p(&sig), "--method", m, "--knots", "10", "--out", p(&d.join(m))]);
    }
    ok(&["bench", "--suite", "table2", "--out", p(&d.join("b"))]);
    let table = fs::read_to_string(d.join("b/bench.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 9);
    assert!(table.contains("skipped"));
}
