//! Scalar root finding: bisection and closed-form cubic/quartic solvers.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` for a sign change of `f`; stops when the bracket is
/// below `xtol` or after `max_iter` halvings.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Internal(alloc::format!("bisection not bracketing on [{lo}, {hi}]")));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The three complex roots of `a x^3 + b x^2 + c x + d` (`a != 0`).
pub fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    let (b, c, d) = (b / a, c / a, d / a);
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let half = Complex64::new(-q / 2.0, 0.0);
    let (c1, c2) = (half + disc, half - disc);
    let big = if c1.norm() >= c2.norm() { c1 } else { c2 };
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    if big.norm() == 0.0 {
        for r in out.iter_mut() {
            *r = Complex64::new(-shift, 0.0);
        }
        return out;
    }
    let cr = big.cbrt();
    let mut w = Complex64::new(1.0, 0.0);
    for r in out.iter_mut() {
        let u = w * cr;
        *r = u - p / (3.0 * u) - shift;
        w *= omega;
    }
    for r in out.iter_mut() {
        *r = polish(&[1.0, b, c, d], *r);
    }
    out
}

/// The four complex roots of `x^4 + a x^3 + b x^2 + c x + d` by Ferrari's method.
pub fn quartic_roots(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 4] {
    let shift = a / 4.0;
    let p = b - 3.0 * a * a / 8.0;
    let q = c - a * b / 2.0 + a * a * a / 8.0;
    let r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a.powi(4) / 256.0;
    let mut out = [Complex64::new(0.0, 0.0); 4];
    let scale = 1.0 + p.abs() + q.abs() + r.abs();
    if q.abs() <= 1e-14 * scale {
        // biquadratic
        let disc = Complex64::new(p * p - 4.0 * r, 0.0).sqrt();
        let z1 = (-p + disc) / 2.0;
        let z2 = (-Complex64::new(p, 0.0) - disc) / 2.0;
        out = [z1.sqrt(), -z1.sqrt(), z2.sqrt(), -z2.sqrt()];
    } else {
        let res = cubic_roots(8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q);
        let m = res.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        let s = (2.0 * m).sqrt();
        let mut k = 0;
        for s1 in [1.0, -1.0] {
            let inner = -(2.0 * p + 2.0 * m + s1 * 2.0 * q / s);
            let t = inner.sqrt();
            for s2 in [1.0, -1.0] {
                out[k] = (s1 * s + s2 * t) / 2.0;
                k += 1;
            }
        }
    }
    for z in out.iter_mut() {
        *z = polish(&[1.0, a, b, c, d], *z - shift);
    }
    out
}

fn polish(coef: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let mut pv = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for &c in coef {
            dv = dv * z + pv;
            pv = pv * z + c;
        }
        if dv.norm() == 0.0 {
            break;
        }
        let step = pv / dv;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let cand = z - step;
        let mut pc = Complex64::new(0.0, 0.0);
        for &c in coef {
            pc = pc * cand + c;
        }
        if pc.norm() <= pv.norm() {
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Real roots (imaginary part below `tol`) sorted ascending.
pub fn real_parts<const N: usize>(roots: &[Complex64; N], tol: f64) -> alloc::vec::Vec<f64> {
    let mut v: alloc::vec::Vec<f64> = roots.iter().filter(|z| z.im.abs() < tol).map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-15, 200).is_err());
    }

    #[test]
    fn cubic_known_roots() {
        // (x-1)(x-2)(x+3)
        let r = real_parts(&cubic_roots(1.0, 0.0, -7.0, 6.0), 1e-10);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_known_roots() {
        // (x-1)(x-2)(x-3)(x+4) = x^4 - 2x^3 - 13x^2 + 38x - 24
        let r = real_parts(&quartic_roots(-2.0, -13.0, 38.0, -24.0), 1e-10);
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip([-4.0, 1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-11, "{r:?}");
        }
        // (x^2+1)(x-1)(x-5): two real roots
        let r = real_parts(&quartic_roots(-6.0, 6.0, -6.0, 5.0), 1e-10);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 5.0).abs() < 1e-12);
        // biquadratic (x^2-1)(x^2-4)
        let r = real_parts(&quartic_roots(0.0, -5.0, 0.0, 4.0), 1e-10);
        assert_eq!(r.len(), 4);
    }
}
