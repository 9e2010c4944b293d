use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mdenoise::io::{read_matrix, write_matrix};
use mdenoise_core::ensembles::{observe, sample_factor_signal, NoiseKind};
use mdenoise_core::theory::ScalarPrior;

fn mdenoise(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdenoise")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn help_lists_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = mdenoise(dir.path(), &["mmse-curve", "--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("gamma,mmse,mi,warning"));
    let o = mdenoise(dir.path(), &["experiment", "--help"]);
    assert!(stdout(&o).contains("mean_mse,stderr,stddev"));
}

#[test]
fn invalid_input_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&mdenoise(dir.path(), &["frobnicate"])), 3);
    assert_eq!(code(&mdenoise(dir.path(), &["mmse-curve", "--prior", "nonsense"])), 3);
    assert_eq!(code(&mdenoise(dir.path(), &["mmse-curve", "--prior", "wigner", "--gamma-step", "-1"])), 3);
    assert_eq!(code(&mdenoise(dir.path(), &["denoise", "--input", "missing.csv", "--gamma", "1"])), 3);
    assert_eq!(code(&mdenoise(dir.path(), &["transition", "--prior", "wigner"])), 3);
}

#[test]
fn wigner_curve_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = mdenoise(dir.path(), &["mi-curve", "--prior", "wigner", "--gamma-min", "2", "--gamma-max", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["gamma", "mmse", "mi", "warning"]);
    let row = r.records().next().unwrap().unwrap();
    let mmse: f64 = row[1].parse().unwrap();
    let mi: f64 = row[2].parse().unwrap();
    assert!((mmse - 1.0 / 3.0).abs() < 1e-8);
    assert!((mi - 0.25 * 3f64.ln()).abs() < 1e-6);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.toml"),
        "prior = \"wigner\"\ngamma-min = 1.0\ngamma-max = 3.0\ngamma-step = 1.0\nout = \"curve.csv\"\n",
    )
    .unwrap();
    let o = mdenoise(dir.path(), &["--config", "c.toml", "mmse-curve", "--gamma-max", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}");
    fs::write(dir.path().join("bad.toml"), "prior = [").unwrap();
    assert_eq!(code(&mdenoise(dir.path(), &["--config", "bad.toml", "mmse-curve"])), 3);
}

#[test]
fn denoise_writes_estimate_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let g = ScalarPrior::gaussian(1.0).unwrap();
    let f = sample_factor_signal(150, 3, &g, 1).unwrap();
    let y = observe(&f.s, 4.0, &NoiseKind::Wigner, 2).unwrap();
    write_matrix(&dir.path().join("y.csv"), &y).unwrap();
    write_matrix(&dir.path().join("s.mdnz"), &f.s).unwrap();
    let base = ["denoise", "--input", "y.csv", "--gamma", "4"];
    for (method, extra) in [
        ("rie-sublinear", vec![]),
        ("rie-linear", vec!["--hilbert", "empirical:0.1"]),
        ("dec-amp", vec!["--rank", "3", "--prior", "gaussian"]),
        ("oracle", vec!["--signal", "s.mdnz"]),
    ] {
        let out = format!("{method}.mdnz");
        let mut args = base.to_vec();
        args.extend(["--method", method, "--out", &out]);
        args.extend(extra);
        let o = mdenoise(dir.path(), &args);
        assert_eq!(code(&o), 0, "{method}: {}", String::from_utf8_lossy(&o.stderr));
        let diag: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(diag["method"], method);
        assert_eq!(read_matrix(&dir.path().join(&out)).unwrap().n(), 150);
    }
    let o = mdenoise(dir.path(), &["denoise", "--input", "y.csv", "--gamma", "4", "--method", "oracle", "--out", "o"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("e.toml"),
        "signal = \"factor\"\nprior = \"rademacher\"\nalpha = 0.5\ngammas = [3.0, 9.0]\nsizes = [60]\n\
         trials = 2\nmethods = [\"rie-sublinear\", \"dec-amp\"]\nseed = 11\n",
    )
    .unwrap();
    for stem in ["a", "b"] {
        let o = mdenoise(dir.path(), &["--config", "e.toml", "--out", stem, "experiment"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("n,gamma,method,mean_mse,stderr,stddev,trials,seeds,error"));
    assert_eq!(text.lines().count(), 5);
    let o = mdenoise(dir.path(), &["--config", "e.toml", "--seed", "12", "--out", "c", "experiment"]);
    assert_eq!(code(&o), 0);
    assert_ne!(fs::read(dir.path().join("c.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    let o = mdenoise(dir.path(), &["--config", "e.toml", "experiment", "--sizes", "7000"]);
    assert_eq!(code(&o), 3);
    let o = mdenoise(dir.path(), &["--config", "e.toml", "experiment", "--trials", "0"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn spectrum_and_transition_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = mdenoise(dir.path(), &["spectrum", "--spectrum", "rademacher", "--gamma", "0", "--n", "400"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(summary["ks"].as_f64().unwrap() < 0.05);
    assert!(dir.path().join("spectrum.hist.csv").exists() && dir.path().join("spectrum.theory.csv").exists());
    let o = mdenoise(dir.path(), &["transition", "--prior", "rademacher", "--h", "0.01", "--out", "t"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(fit["gamma_c"], 1.0);
    let rows = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(rows.starts_with("gamma,mmse,d1,d2,d3,d4,warning"));
}
