use mdenoise_core::measures::{
    bernoulli_rho_y, free_convolve_semicircle, marchenko_pastur_rho_y, rademacher_rho_y, support_components,
    SpectralMeasure,
};

fn sample_points(m: &SpectralMeasure, n: usize) -> Vec<f64> {
    let h = m.hull();
    let span = h.hi - h.lo;
    (0..n).map(|i| h.lo - 0.05 * span + 1.1 * span * (i as f64 + 0.5) / n as f64).collect()
}

fn max_gap(a: &SpectralMeasure, b: &SpectralMeasure, n: usize) -> f64 {
    sample_points(a, n).into_iter().map(|x| (a.density_at(x) - b.density_at(x)).abs()).fold(0.0, f64::max)
}

#[test]
fn rademacher_closed_form_matches_subordination() {
    let gamma: f64 = 2.0;
    let s = gamma.sqrt();
    let base = SpectralMeasure::atomic(&[(-s, 0.5), (s, 0.5)]).unwrap();
    let (generic, _) = free_convolve_semicircle(&base).unwrap();
    let closed = rademacher_rho_y(gamma).unwrap();
    let gap = max_gap(&closed, &generic, 200);
    assert!(gap < 1e-6, "gap {gap}");
}

#[test]
fn bernoulli_closed_form_matches_subordination() {
    let (gamma, p): (f64, f64) = (1.0, 0.5);
    let base = SpectralMeasure::atomic(&[(0.0, p), (gamma.sqrt(), 1.0 - p)]).unwrap();
    let (generic, _) = free_convolve_semicircle(&base).unwrap();
    let closed = bernoulli_rho_y(gamma, p).unwrap();
    let gap = max_gap(&closed, &generic, 200);
    assert!(gap < 1e-6, "gap {gap}");
}

#[test]
fn marchenko_pastur_closed_form_matches_subordination() {
    let (gamma, q): (f64, f64) = (1.0, 2.0);
    let base = SpectralMeasure::marchenko_pastur(q).unwrap().scaled(gamma.sqrt()).unwrap();
    let (generic, _) = free_convolve_semicircle(&base).unwrap();
    let closed = marchenko_pastur_rho_y(gamma, q).unwrap();
    let gap = max_gap(&closed, &generic, 200);
    assert!(gap < 1e-5, "gap {gap}");
}

#[test]
fn closed_forms_are_normalized() {
    let measures = [
        rademacher_rho_y(0.5).unwrap(),
        rademacher_rho_y(1.0).unwrap(),
        rademacher_rho_y(3.0).unwrap(),
        bernoulli_rho_y(2.0, 0.9).unwrap(),
        bernoulli_rho_y(5.0, 0.7).unwrap(),
        marchenko_pastur_rho_y(6.0, 8.0).unwrap(),
        marchenko_pastur_rho_y(16.0, 8.0).unwrap(),
        marchenko_pastur_rho_y(2.0, 0.5).unwrap(),
        SpectralMeasure::marchenko_pastur(0.5).unwrap(),
        SpectralMeasure::marchenko_pastur(4.0).unwrap(),
    ];
    for m in &measures {
        let mass = m.mass().unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
    }
}

#[test]
fn subordination_adds_unit_variance() {
    let bases = [
        SpectralMeasure::atomic(&[(-1.0, 0.3), (0.5, 0.5), (2.0, 0.2)]).unwrap(),
        SpectralMeasure::bernoulli(0.8).unwrap().scaled(2.0).unwrap(),
        SpectralMeasure::semicircle(0.5).unwrap(),
    ];
    for m in &bases {
        let (y, map) = free_convolve_semicircle(m).unwrap();
        let lhs = y.moment(2).unwrap();
        let rhs = m.moment(2).unwrap() + 1.0;
        assert!((lhs - rhs).abs() < 1e-5, "{lhs} vs {rhs}");
        assert!(map.v_values.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(map.psi_values.windows(2).all(|w| w[0] <= w[1]));
        assert!(map.u_grid.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn component_counts() {
    assert_eq!(support_components(&SpectralMeasure::semicircle(1.0).unwrap()).count(), 1);
    assert_eq!(support_components(&rademacher_rho_y(2.0).unwrap()).count(), 2);
    assert_eq!(support_components(&rademacher_rho_y(0.5).unwrap()).count(), 1);
}
