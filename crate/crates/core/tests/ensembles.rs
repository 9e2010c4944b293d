use mdenoise_core::ensembles::{
    derive_seed, observe, rank_for_alpha, sample_factor_signal, sample_goe, sample_haar_orthogonal,
    sample_rot_inv_signal, EigenvalueSource, NoiseKind, SymmetricMatrixInstance,
};
use mdenoise_core::linalg::{lanczos_top, DenseBackend, NalgebraBackend};
use mdenoise_core::measures::{ks_distance_to, SpectralMeasure};
use mdenoise_core::numerics::ks_distance;
use mdenoise_core::theory::ScalarPrior;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spectrum(a: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn top_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    lanczos_top(a, 300, 1e-10, &mut rng).unwrap().0
}

#[test]
fn goe_second_moment_and_edge() {
    let z = sample_goe(2000, 1).unwrap();
    let m2 = z.matrix().norm_squared() / 2000.0;
    assert!((0.95..=1.05).contains(&m2), "{m2}");
    let ev = spectrum(z.matrix());
    assert!(ev[0] > -2.2 && ev[1999] < 2.2);
}

#[test]
fn goe_spectrum_approaches_semicircle() {
    let sc = SpectralMeasure::semicircle(1.0).unwrap();
    let ks: Vec<f64> = [200, 800, 3200]
        .iter()
        .map(|&n| ks_distance_to(&spectrum(sample_goe(n, 5).unwrap().matrix()), &sc).unwrap())
        .collect();
    assert!(ks[0] > ks[2], "{ks:?}");
    assert!(ks[1] > ks[2] * 0.8, "{ks:?}");
    assert!(ks[2] < 0.01, "{ks:?}");
}

#[test]
fn haar_columns_are_isotropic() {
    let n = 500;
    let trials = 20;
    let mut mean = 0.0;
    let mut plain = Vec::new();
    let mut permuted = Vec::new();
    for t in 0..trials {
        let q = sample_haar_orthogonal(n, derive_seed(3, t, "haar")).unwrap();
        assert!((q.transpose() * &q - DMatrix::<f64>::identity(n, n)).norm() < 1e-10);
        mean += q.column(0).sum();
        plain.extend(q.column(0).iter().map(|v| v * (n as f64).sqrt()));
        // Reverse the rows: a fixed permutation P applied as P Q.
        permuted.extend((0..n).map(|i| q[(n - 1 - i, 1)] * (n as f64).sqrt()));
    }
    mean /= (n * trials as usize) as f64;
    assert!(mean.abs() < 3.0 / ((n * trials as usize) as f64).sqrt(), "{mean}");
    // Entries of a uniform unit vector are close to N(0, 1/n).
    let normal_cdf = |x: f64| {
        let c = 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
        (c, c)
    };
    assert!(ks_distance(&plain, normal_cdf).unwrap() < 0.03);
    assert!(ks_distance(&permuted, normal_cdf).unwrap() < 0.03);
}

#[test]
fn rot_inv_signal_has_requested_spectrum() {
    let n = 1000;
    let vals: Vec<f64> = (0..n).map(|i| if i < n / 2 { -1.0 } else { 1.0 }).collect();
    let s = sample_rot_inv_signal(n, &EigenvalueSource::Explicit(vals), 2).unwrap();
    let ev = spectrum(s.matrix());
    assert!(ev[..n / 2].iter().all(|v| (v + 1.0).abs() < 1e-9));
    assert!(ev[n / 2..].iter().all(|v| (v - 1.0).abs() < 1e-9));
    let cached = s.cached_eigen().unwrap();
    let orth = cached.vectors.transpose() * &cached.vectors - DMatrix::<f64>::identity(n, n);
    assert!(orth.norm() < 1e-8);
    assert!(cached.values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn rot_inv_draws_follow_measure() {
    let n = 800;
    let m = SpectralMeasure::marchenko_pastur(0.5).unwrap();
    let s = sample_rot_inv_signal(n, &EigenvalueSource::Draws { measure: m.clone(), count: n }, 7).unwrap();
    let ks = ks_distance_to(&spectrum(s.matrix()), &m).unwrap();
    assert!(ks < 0.05, "{ks}");
}

#[test]
fn sublinear_signal_rank() {
    let n = 900;
    let m = (n as f64).sqrt().floor() as usize;
    let s = sample_rot_inv_signal(n, &EigenvalueSource::Explicit(vec![1.0; m]), 4).unwrap();
    let ev = spectrum(s.matrix());
    assert_eq!(ev.iter().filter(|v| v.abs() > 1e-8).count(), m);
}

#[test]
fn wishart_factor_spectrum_concentrates_at_one() {
    let n = 2500;
    let m = rank_for_alpha(n, 0.5).unwrap();
    assert_eq!(m, 50);
    let f = sample_factor_signal(n, m, &ScalarPrior::gaussian(1.0).unwrap(), 11).unwrap();
    // Nonzero spectrum of X X^T / N equals that of X^T X / N.
    let small = f.x.transpose() * &f.x / n as f64;
    let ev = spectrum(&small);
    // Marchenko-Pastur of ratio M/N: edges at (1 +- sqrt(M/N))^2.
    let c = (m as f64 / n as f64).sqrt();
    assert!(ev[0] > (1.0 - c).powi(2) - 0.05 && ev[m - 1] < (1.0 + c).powi(2) + 0.05, "{ev:?}");
    let mean = ev.iter().sum::<f64>() / m as f64;
    assert!((mean - 1.0).abs() < 0.02, "{mean}");
    let near = ev.iter().filter(|v| (*v - 1.0).abs() < 0.2).count();
    assert!(near as f64 >= 0.75 * m as f64, "{near}");
    let direct = &f.x * f.x.transpose() / n as f64;
    let rel = (&direct - f.s.matrix()).norm() / direct.norm();
    assert!(rel < 1e-12);
}

#[test]
fn factor_signal_numerical_rank() {
    let n = 300;
    for m in [1, 7, 40] {
        let f = sample_factor_signal(n, m, &ScalarPrior::gaussian(1.0).unwrap(), m as u64).unwrap();
        let ev = spectrum(f.s.matrix());
        let scale = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert_eq!(ev.iter().filter(|v| v.abs() > 1e-10 * scale).count(), m.min(n));
    }
}

#[test]
fn spike_outlier_location() {
    let n = 2000;
    let f = sample_rot_inv_signal(n, &EigenvalueSource::Explicit(vec![1.0]), 21).unwrap();
    let y = observe(&f, 4.0, &NoiseKind::Wigner, 22).unwrap();
    assert!((top_eigenvalue(y.matrix()) - 2.5).abs() < 0.1);
    let y = observe(&f, 0.25, &NoiseKind::Wigner, 23).unwrap();
    assert!((top_eigenvalue(y.matrix()) - 2.0).abs() < 0.1);
}

#[test]
fn observation_is_deterministic_and_symmetric() {
    let s = sample_goe(120, 1).unwrap();
    for noise in [NoiseKind::Wigner, NoiseKind::UniformSpectrum { a: 1.0, b: 2.0 }] {
        let a = observe(&s, 2.0, &noise, 9).unwrap();
        let b = observe(&s, 2.0, &noise, 9).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!(SymmetricMatrixInstance::new(a.matrix().clone()).is_ok());
    }
    let e = NalgebraBackend.eigh(observe(&s, 0.0, &NoiseKind::Wigner, 2).unwrap().matrix()).unwrap();
    assert_eq!(e.values.len(), 120);
}
