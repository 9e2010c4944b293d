//! Shorthand descriptions of spectral priors, e.g. `bernoulli:p=0.9`.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    bernoulli_rho_y, free_convolve_semicircle, marchenko_pastur_rho_y, rademacher_rho_y, PriorKind, SpectralMeasure,
};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureSpec {
    /// `(delta_{-1} + delta_{+1}) / 2`
    Rademacher,
    /// `p delta_0 + (1 - p) delta_1`
    Bernoulli {
        p: f64,
    },
    /// Marchenko-Pastur law of ratio `q`
    MarchenkoPastur {
        q: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Delta {
        x: f64,
    },
    /// Semicircle with the given variance.
    Wigner {
        variance: f64,
    },
}

impl MeasureSpec {
    pub fn measure(&self) -> Result<SpectralMeasure> {
        match *self {
            MeasureSpec::Rademacher => Ok(SpectralMeasure::rademacher()),
            MeasureSpec::Bernoulli { p } => SpectralMeasure::bernoulli(p),
            MeasureSpec::MarchenkoPastur { q } => SpectralMeasure::marchenko_pastur(q),
            MeasureSpec::Uniform { a, b } => SpectralMeasure::uniform(a, b),
            MeasureSpec::Delta { x } => SpectralMeasure::delta(x),
            MeasureSpec::Wigner { variance } => SpectralMeasure::semicircle(variance),
        }
    }

    /// `rho_Y` at SNR `gamma`: closed form when one exists, otherwise the
    /// generic subordination solver.
    pub fn rho_y(&self, gamma: f64) -> Result<SpectralMeasure> {
        if !(gamma > 0.0) {
            return Err(invalid("gamma must be positive"));
        }
        match *self {
            MeasureSpec::Rademacher => rademacher_rho_y(gamma),
            MeasureSpec::Bernoulli { p } => bernoulli_rho_y(gamma, p),
            MeasureSpec::MarchenkoPastur { q } => marchenko_pastur_rho_y(gamma, q),
            MeasureSpec::Wigner { variance } => SpectralMeasure::semicircle(gamma * variance + 1.0),
            _ => Ok(free_convolve_semicircle(&self.measure()?.scaled(gamma.sqrt())?)?.0),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, MeasureSpec::Uniform { .. } | MeasureSpec::Delta { .. })
    }

    pub fn prior_kind(&self) -> Option<PriorKind> {
        match *self {
            MeasureSpec::Rademacher => Some(PriorKind::Rademacher),
            MeasureSpec::Bernoulli { p } => Some(PriorKind::Bernoulli { p }),
            MeasureSpec::MarchenkoPastur { q } => Some(PriorKind::MarchenkoPastur { q }),
            _ => None,
        }
    }
}

fn num(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| invalid(format!("cannot parse {what} from '{s}'")))?;
    if !v.is_finite() {
        return Err(invalid(format!("{what} must be finite")));
    }
    Ok(v)
}

fn keyed(arg: &str, key: &str) -> Result<f64> {
    let v = match arg.split_once('=') {
        Some((k, v)) if k.trim() == key => v,
        Some((k, _)) => return Err(invalid(format!("unexpected key '{k}'"))),
        None => arg,
    };
    num(v, key)
}

impl FromStr for MeasureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s, None),
        };
        let need = |what: &str| arg.ok_or_else(|| invalid(format!("'{name}' needs {what}")));
        let spec = match name.to_ascii_lowercase().as_str() {
            "rademacher" => MeasureSpec::Rademacher,
            "bernoulli" => {
                let p = keyed(need("p")?, "p")?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid("p must lie in (0, 1)"));
                }
                MeasureSpec::Bernoulli { p }
            }
            "mp" | "marchenko-pastur" => {
                let q = keyed(need("q")?, "q")?;
                if !(q > 0.0) {
                    return Err(invalid("q must be positive"));
                }
                MeasureSpec::MarchenkoPastur { q }
            }
            "uniform" => {
                let (a, b) = need("bounds")?.split_once(',').ok_or_else(|| invalid("uniform needs 'a,b'"))?;
                let (a, b) = (num(a, "a")?, num(b, "b")?);
                if !(b > a) {
                    return Err(invalid("uniform needs a < b"));
                }
                MeasureSpec::Uniform { a, b }
            }
            "delta" => MeasureSpec::Delta { x: num(need("location")?, "location")? },
            "wigner" | "semicircle" => {
                let variance = match arg {
                    Some(a) => keyed(a, "var")?,
                    None => 1.0,
                };
                if !(variance > 0.0) {
                    return Err(invalid("variance must be positive"));
                }
                MeasureSpec::Wigner { variance }
            }
            other => return Err(invalid(format!("unknown measure '{other}'"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = match *self {
            MeasureSpec::Rademacher => "rademacher".to_string(),
            MeasureSpec::Bernoulli { p } => format!("bernoulli:p={p}"),
            MeasureSpec::MarchenkoPastur { q } => format!("mp:q={q}"),
            MeasureSpec::Uniform { a, b } => format!("uniform:{a},{b}"),
            MeasureSpec::Delta { x } => format!("delta:{x}"),
            MeasureSpec::Wigner { variance } => format!("wigner:var={variance}"),
        };
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_shorthands() {
        assert_eq!("rademacher".parse::<MeasureSpec>().unwrap(), MeasureSpec::Rademacher);
        assert_eq!("bernoulli:p=0.9".parse::<MeasureSpec>().unwrap(), MeasureSpec::Bernoulli { p: 0.9 });
        assert_eq!("mp:q=8".parse::<MeasureSpec>().unwrap(), MeasureSpec::MarchenkoPastur { q: 8.0 });
        assert_eq!("uniform:1,2".parse::<MeasureSpec>().unwrap(), MeasureSpec::Uniform { a: 1.0, b: 2.0 });
        assert_eq!("delta:1".parse::<MeasureSpec>().unwrap(), MeasureSpec::Delta { x: 1.0 });
        assert_eq!("wigner".parse::<MeasureSpec>().unwrap(), MeasureSpec::Wigner { variance: 1.0 });
        for bad in ["bernoulli:p=1.5", "mp", "uniform:2,1", "cauchy", "bernoulli:q=0.2"] {
            assert!(bad.parse::<MeasureSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["rademacher", "bernoulli:p=0.9", "mp:q=8", "uniform:1,2", "delta:1", "wigner:var=2"] {
            let m: MeasureSpec = s.parse().unwrap();
            assert_eq!(m.to_string().parse::<MeasureSpec>().unwrap(), m);
        }
    }
}
