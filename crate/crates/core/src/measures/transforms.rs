//! Cauchy and Hilbert transforms, logarithmic potentials, support detection.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Interval, SpectralMeasure};
use crate::error::{domain, Result};
use crate::numerics::{Panel, Quadrature};

const ON_SUPPORT: f64 = 1e-12;

fn ensure_outside(m: &SpectralMeasure, z: f64) -> Result<()> {
    if m.atoms().iter().any(|a| (a.location - z).abs() <= ON_SUPPORT) {
        return Err(domain(format!("{z} is an atom location")));
    }
    if m.support().iter().any(|iv| iv.distance(z) <= ON_SUPPORT) {
        return Err(domain(format!("{z} lies on the support")));
    }
    Ok(())
}

fn transform_quad() -> Quadrature {
    Quadrature::with_rel_tol(1e-10).abs_tol(1e-15)
}

/// `G(z) = int m(dx) / (z - x)` for real `z` off the support.
pub fn cauchy_transform(m: &SpectralMeasure, z: f64) -> Result<f64> {
    ensure_outside(m, z)?;
    let mut s: f64 = m.atoms().iter().map(|a| a.weight / (z - a.location)).sum();
    if let Some(d) = m.density() {
        s += transform_quad().integrate_panels(|x| d.eval(x) / (z - x), &m.panels())?;
    }
    Ok(s)
}

/// `G'(z) = -int m(dx) / (z - x)^2`.
pub fn cauchy_derivative(m: &SpectralMeasure, z: f64) -> Result<f64> {
    ensure_outside(m, z)?;
    let mut s: f64 = m.atoms().iter().map(|a| a.weight / (z - a.location).powi(2)).sum();
    if let Some(d) = m.density() {
        s += transform_quad().integrate_panels(|x| d.eval(x) / (z - x).powi(2), &m.panels())?;
    }
    Ok(-s)
}

/// Cauchy transform allowed at a support edge with square-root decay
/// (the integral converges there). Used for `G(r+)` at the right edge.
pub(crate) fn cauchy_at_edge(m: &SpectralMeasure, z: f64) -> Result<f64> {
    let mut s: f64 = m.atoms().iter().map(|a| a.weight / (z - a.location)).sum();
    if let Some(d) = m.density() {
        s += transform_quad().integrate_panels(|x| d.eval(x) / (z - x), &m.panels())?;
    }
    Ok(s)
}

/// Principal value `(1/pi) PV int rho(t) / (x - t) dt`.
pub fn hilbert_transform(m: &SpectralMeasure, x: f64) -> Result<f64> {
    hilbert_transform_with(m, x, &Quadrature::with_rel_tol(1e-9).abs_tol(1e-13))
}

pub(crate) fn hilbert_transform_with(m: &SpectralMeasure, x: f64, q: &Quadrature) -> Result<f64> {
    if m.atoms().iter().any(|a| (a.location - x).abs() <= ON_SUPPORT) {
        return Err(domain(format!("atom at {x}")));
    }
    let mut s: f64 = m.atoms().iter().map(|a| a.weight / (x - a.location)).sum();
    if let Some(d) = m.density() {
        let rx = d.eval(x);
        let mut panels = Vec::new();
        let mut log_term = 0.0;
        for iv in d.support() {
            if x > iv.lo && x < iv.hi {
                panels.push(Panel { lo: iv.lo, hi: x, sqrt_lo: true, sqrt_hi: false });
                panels.push(Panel { lo: x, hi: iv.hi, sqrt_lo: false, sqrt_hi: true });
                if rx != 0.0 {
                    log_term += rx * ((x - iv.lo) / (iv.hi - x)).ln();
                }
            } else {
                panels.push(Panel::edges(iv.lo, iv.hi));
            }
        }
        let inside = |t: f64| d.support().iter().any(|iv| x > iv.lo && x < iv.hi && iv.contains(t));
        s += q.integrate_panels(
            |t| {
                if t == x {
                    return 0.0;
                }
                let r = d.eval(t);
                if inside(t) {
                    (r - rx) / (x - t)
                } else {
                    r / (x - t)
                }
            },
            &panels,
        )?;
        s += log_term;
    }
    Ok(s / PI)
}

/// `int ln|v - x| m(dx)`; an inner log singularity is removed by subtracting
/// `rho(v)` and adding `rho(v) int ln|v - t| dt` exactly.
pub fn log_potential(m: &SpectralMeasure, v: f64) -> Result<f64> {
    log_potential_with(m, v, &Quadrature::with_rel_tol(1e-11).abs_tol(1e-15))
}

pub(crate) fn log_potential_with(m: &SpectralMeasure, v: f64, q: &Quadrature) -> Result<f64> {
    if m.atoms().iter().any(|a| a.location == v) {
        return Err(domain(format!("log potential at atom {v}")));
    }
    let mut s: f64 = m.atoms().iter().map(|a| a.weight * (v - a.location).abs().ln()).sum();
    if let Some(d) = m.density() {
        let rv = d.eval(v);
        let mut panels = Vec::new();
        let mut exact = 0.0;
        let mut home: Option<Interval> = None;
        for iv in d.support() {
            if v > iv.lo && v < iv.hi {
                panels.push(Panel::edges(iv.lo, v));
                panels.push(Panel::edges(v, iv.hi));
                let (a, b) = (v - iv.lo, iv.hi - v);
                exact += rv * (a * a.ln() - a + b * b.ln() - b);
                home = Some(*iv);
            } else {
                panels.push(Panel::edges(iv.lo, iv.hi));
            }
        }
        s += q.integrate_panels(
            |t| {
                if t == v {
                    return 0.0;
                }
                let r = d.eval(t);
                let l = (v - t).abs().ln();
                match home {
                    Some(iv) if iv.contains(t) => (r - rv) * l,
                    _ => r * l,
                }
            },
            &panels,
        )?;
        s += exact;
    }
    Ok(s)
}

/// Maximal intervals where the density exceeds a floor.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub intervals: Vec<Interval>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.intervals.len()
    }
}

/// Components with the default floor `1e-10` and gap tolerance `1e-6`.
pub fn support_components(m: &SpectralMeasure) -> Components {
    support_components_with(m, 1e-10, 1e-6)
}

pub fn support_components_with(m: &SpectralMeasure, floor: f64, gap: f64) -> Components {
    let mut runs: Vec<Interval> = Vec::new();
    if let Some(d) = m.density() {
        let n = d.scan_points().max(8);
        for iv in d.support() {
            let w = iv.width();
            let xs: Vec<f64> = (0..=n).map(|k| iv.lo + 0.5 * w * (1.0 - (PI * k as f64 / n as f64).cos())).collect();
            let above: Vec<bool> =
                xs.iter().enumerate().map(|(k, &x)| if k == 0 || k == n { false } else { d.eval(x) > floor }).collect();
            let edge = |a: f64, b: f64, rising: bool| {
                // locate the floor crossing between two samples
                let (mut lo, mut hi) = (a, b);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if (d.eval(mid) > floor) == rising {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            let mut start: Option<f64> = None;
            for k in 1..=n {
                if above[k] && !above[k - 1] {
                    start = Some(if k == 1 { iv.lo } else { edge(xs[k - 1], xs[k], true) });
                } else if !above[k] && above[k - 1] {
                    let end = if k == n { iv.hi } else { edge(xs[k - 1], xs[k], false) };
                    if let Some(s) = start.take() {
                        runs.push(Interval::new(s, end));
                    }
                }
            }
        }
    }
    runs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut merged: Vec<Interval> = Vec::new();
    for r in runs {
        match merged.last_mut() {
            Some(last) if r.lo - last.hi < gap => last.hi = last.hi.max(r.hi),
            _ => merged.push(r),
        }
    }
    Components { intervals: merged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::rademacher_rho_y;

    #[test]
    fn cauchy_examples() {
        let sc = SpectralMeasure::semicircle(1.0).unwrap();
        assert!((cauchy_transform(&sc, 3.0).unwrap() - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-10);
        let u = SpectralMeasure::uniform(1.0, 2.0).unwrap();
        assert!((cauchy_transform(&u, 3.0).unwrap() - 2f64.ln()).abs() < 1e-10);
        let d = SpectralMeasure::delta(0.0).unwrap();
        assert_eq!(cauchy_transform(&d, 2.0).unwrap(), 0.5);
        assert!(cauchy_transform(&sc, 1.0).is_err());
        assert!(cauchy_transform(&sc, 2.0).is_err());
        assert!(cauchy_transform(&d, 0.0).is_err());
    }

    #[test]
    fn cauchy_derivative_examples() {
        let d = SpectralMeasure::delta(0.0).unwrap();
        assert_eq!(cauchy_derivative(&d, 2.0).unwrap(), -0.25);
        let u = SpectralMeasure::uniform(1.0, 2.0).unwrap();
        assert!((cauchy_derivative(&u, 3.0).unwrap() + 0.5).abs() < 1e-10);
        let sc = SpectralMeasure::semicircle(1.0).unwrap();
        let h = 1e-6;
        let fd = (cauchy_transform(&sc, 3.0 + h).unwrap() - cauchy_transform(&sc, 3.0 - h).unwrap()) / (2.0 * h);
        let g = cauchy_derivative(&sc, 3.0).unwrap();
        assert!((g - fd).abs() < 1e-7);
        assert!((g + (3.0 / 5f64.sqrt() - 1.0) / 2.0).abs() < 1e-8);
    }

    #[test]
    fn hilbert_examples() {
        let sc = SpectralMeasure::semicircle(1.0).unwrap();
        assert!((hilbert_transform(&sc, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-9);
        assert!(hilbert_transform(&sc, 0.0).unwrap().abs() < 1e-12);
        assert!((hilbert_transform(&sc, 3.0).unwrap() - (3.0 - 5f64.sqrt()) / (2.0 * PI)).abs() < 1e-9);
        // inside the support the semicircle gives x / (2 pi sigma^2)
        let sc3 = SpectralMeasure::semicircle(3.0).unwrap();
        for x in [-3.3, -0.7, 1.9, 3.4] {
            assert!((hilbert_transform(&sc3, x).unwrap() - x / (6.0 * PI)).abs() < 1e-9);
        }
        let d = SpectralMeasure::delta(0.0).unwrap();
        assert!(hilbert_transform(&d, 0.0).is_err());
    }

    #[test]
    fn hilbert_at_edges_and_even_densities() {
        let sc = SpectralMeasure::semicircle(1.0).unwrap();
        assert!((hilbert_transform(&sc, 2.0).unwrap() - 1.0 / PI).abs() < 1e-9);
        let r = rademacher_rho_y(0.7).unwrap();
        assert!(hilbert_transform(&r, 0.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn log_potential_of_semicircle() {
        // int ln|v - x| sc(dx) = v^2/4 - 1/2 on [-2, 2]
        let sc = SpectralMeasure::semicircle(1.0).unwrap();
        for v in [0.0, 0.4, 1.3, 2.0] {
            assert!((log_potential(&sc, v).unwrap() - (v * v / 4.0 - 0.5)).abs() < 1e-10, "v={v}");
        }
        // outside: A/(A+sqrt(A^2-4)) + ln(A+sqrt(A^2-4)) - 1/2 - ln 2 with B = 1
        let v: f64 = 3.0;
        let r = (v * v - 4.0).sqrt();
        let exact = v / (v + r) + (v + r).ln() - 0.5 - 2f64.ln();
        assert!((log_potential(&sc, v).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn semicircle_single_component() {
        let c = support_components(&SpectralMeasure::semicircle(1.0).unwrap());
        assert_eq!(c.count(), 1);
        assert!((c.intervals[0].lo + 2.0).abs() < 1e-12 && (c.intervals[0].hi - 2.0).abs() < 1e-12);
    }
}
