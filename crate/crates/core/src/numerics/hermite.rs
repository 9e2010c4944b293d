//! Expectations under the standard normal law.

#[allow(unused_imports)]
use num_traits::Float;

use super::{Panel, Quadrature};
use crate::error::Error;

/// 61-node rule, nonnegative half: `E f(Z) ~ w0 f(0) + sum w_k (f(z_k) + f(-z_k))`.
const GH61: [(f64, f64); 31] = [
    (0.0, 0.15981414117778535617),
    (0.40063821105995049206, 0.14753749310915864445),
    (0.8015382630317265855, 0.1160576513452515956),
    (1.2029642303011723284, 0.077742307060467862788),
    (1.6051847101182256355, 0.04429919014155633415),
    (2.008475226640472094, 0.021440700089215401467),
    (2.4131208142506848327, 0.0087970077780564754112),
    (2.8194188542255728953, 0.0030522259632903189842),
    (3.2276822527149105572, 0.00089286291334885392657),
    (3.6382430676068060947, 0.00021942509449102738995),
    (4.0514567191649028933, 0.000045111525791571676646),
    (4.4677069572407988504, 7.7204093582151220506e-6),
    (4.887411810748714214, 1.0935537165661110849e-6),
    (5.3110308195370260446, 1.2734244397327137293e-7),
    (5.7390739549506931965, 1.2096242825343146554e-8),
    (6.1721127891630710448, 9.2880342218154709459e-10),
    (6.6107947002797749877, 5.7039803251286354776e-11),
    (7.0558612422325789793, 2.7668880796351236181e-12),
    (7.5081723365509911424, 1.0446062071534588904e-13),
    (7.9687387811758625868, 3.0158661318419225693e-15),
    (8.4387669441217875807, 6.5184766419075549797e-17),
    (8.919721841212938333, 1.0277368048053693301e-18),
    (9.413418928509502288, 1.1444908106729465443e-20),
    (9.9221626372550859863, 8.6411169244947932162e-23),
    (10.448964909729461348, 4.1939484179227371596e-25),
    (10.997909441340786088, 1.2179530564067152341e-27),
    (11.574803203521677055, 1.9132142559222252681e-30),
    (12.188457192776551964, 1.3977653698327198173e-33),
    (12.853564295912951536, 3.7088060732095639449e-37),
    (13.598659156615787863, 2.2364824894989936017e-41),
    (14.498533915900149317, 9.3712287678835697734e-47),
];

/// `E[f(Z)]` for `Z ~ N(0, 1)` with the 61-node Gauss-Hermite rule.
pub fn gauss_hermite<F: FnMut(f64) -> f64>(mut f: F) -> f64 {
    let mut s = GH61[0].1 * f(0.0);
    for &(z, w) in &GH61[1..] {
        s += w * (f(z) + f(-z));
    }
    s
}

/// `E[f(Z)]` by adaptive quadrature of `f(z) phi(z)` over `[-12, 12]`.
///
/// Slower than [`gauss_hermite`] but accurate for integrands with poles
/// close to the real axis, such as `tanh(s + sqrt(s) z)`.
pub fn gaussian_expectation<F: FnMut(f64) -> f64>(mut f: F) -> f64 {
    let norm = 1.0 / (2.0 * core::f64::consts::PI).sqrt();
    let q = Quadrature::with_rel_tol(1e-12).abs_tol(1e-16);
    let panels = [Panel::plain(-12.0, 0.0), Panel::plain(0.0, 12.0)];
    match q.integrate_panels(|z| f(z) * (-0.5 * z * z).exp() * norm, &panels) {
        Ok(v) => v,
        Err(Error::Accuracy { estimate, .. }) => estimate,
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_handles_tanh() {
        // Reference from 30-digit quadrature.
        let s: f64 = 2.0;
        let v = 1.0 - gaussian_expectation(|z| (s + s.sqrt() * z).tanh());
        assert!((v - 0.231018221929295619).abs() < 1e-12, "{v}");
        assert!((gaussian_expectation(|z| z.powi(4)) - 3.0).abs() < 1e-11);
    }

    #[test]
    fn normal_moments() {
        assert!((gauss_hermite(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((gauss_hermite(|z| z * z) - 1.0).abs() < 1e-13);
        assert!((gauss_hermite(|z| z.powi(4)) - 3.0).abs() < 1e-12);
        assert!((gauss_hermite(|z| z.powi(6)) - 15.0).abs() < 1e-11);
    }

    #[test]
    fn lognormal_mean() {
        // E exp(Z) = exp(1/2)
        assert!((gauss_hermite(|z| z.exp()) - 0.5f64.exp()).abs() < 1e-13);
    }
}
