use mdenoise_core::ensembles::{
    observe, rank_for_alpha, sample_factor_signal, sample_rot_inv_signal, EigenvalueSource, NoiseKind,
};
use mdenoise_core::estimators::{
    decimation_amp, mse, oracle, rie_linear, rie_sublinear, AmpOptions, HilbertMode, Normalization, SublinearNoise,
};
use mdenoise_core::measures::MeasureSpec;
use mdenoise_core::theory::{rank_one_replica, ScalarPrior};

#[test]
fn empirical_hilbert_tracks_density() {
    let n = 2000;
    let gamma = 2.0;
    let vals = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let s = sample_rot_inv_signal(n, &EigenvalueSource::Explicit(vals), 1).unwrap();
    let y = observe(&s, gamma, &NoiseKind::Wigner, 2).unwrap();
    let rho = MeasureSpec::Rademacher.rho_y(gamma).unwrap();
    let e = rie_linear(&y, gamma, HilbertMode::Empirical).unwrap();
    let d = rie_linear(&y, gamma, HilbertMode::Density(&rho)).unwrap();
    let rms = (e.xi.iter().zip(&d.xi).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n as f64).sqrt();
    assert!(rms < 0.05, "{rms}");
    let o = oracle(&y, &s).unwrap();
    let mo = mse(&s, &o.estimate, Normalization::PerDim).unwrap();
    assert!(mo <= mse(&s, &e.estimate, Normalization::PerDim).unwrap());
    assert!(mo <= mse(&s, &d.estimate, Normalization::PerDim).unwrap());
}

#[test]
fn sublinear_rie_on_wishart_signal() {
    let n = 2000;
    let m = rank_for_alpha(n, 0.5).unwrap();
    let f = sample_factor_signal(n, m, &ScalarPrior::gaussian(1.0).unwrap(), 3).unwrap();
    let y = observe(&f.s, 3.0, &NoiseKind::Wigner, 4).unwrap();
    let r = rie_sublinear(&y, 3.0, &SublinearNoise::Wigner).unwrap();
    let err = mse(&f.s, &r.estimate, Normalization::PerRank(m)).unwrap();
    assert!((err - 5.0 / 9.0).abs() < 0.02, "{err}");
    let o = oracle(&y, &f.s).unwrap();
    assert!(mse(&f.s, &o.estimate, Normalization::PerRank(m)).unwrap() <= err);
}

#[test]
fn decimation_gaussian_factor() {
    let n = 2000;
    let m = rank_for_alpha(n, 0.5).unwrap();
    assert_eq!(m, 44);
    let g = ScalarPrior::gaussian(1.0).unwrap();
    let f = sample_factor_signal(n, m, &g, 5).unwrap();
    let y = observe(&f.s, 5.0, &NoiseKind::Wigner, 6).unwrap();
    let d = decimation_amp(&y, 5.0, m, &g, &AmpOptions::default()).unwrap();
    let err = mse(&f.s, &d.estimate, Normalization::PerRank(m)).unwrap();
    let target = rank_one_replica(&g, 5.0).unwrap().mmse;
    assert!((err - target).abs() < 0.02, "{err} vs {target}");
}

#[test]
fn decimation_rademacher_factor() {
    let n = 3000;
    let m = rank_for_alpha(n, 0.3).unwrap();
    assert_eq!(m, 11);
    let r = ScalarPrior::rademacher();
    let f = sample_factor_signal(n, m, &r, 7).unwrap();
    let y = observe(&f.s, 9.0, &NoiseKind::Wigner, 8).unwrap();
    let d = decimation_amp(&y, 9.0, m, &r, &AmpOptions::default()).unwrap();
    let err = mse(&f.s, &d.estimate, Normalization::PerRank(m)).unwrap();
    assert!((err - 0.00846).abs() < 0.01, "{err}");
}
