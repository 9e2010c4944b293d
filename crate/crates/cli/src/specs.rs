//! Text forms of scalar priors and noise ensembles.

use anyhow::Result;
use mdenoise_core::ensembles::NoiseKind;
use mdenoise_core::estimators::SublinearNoise;
use mdenoise_core::theory::ScalarPrior;

use crate::io::PriorSource;
use crate::InvalidInput;

fn number(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| InvalidInput(format!("`{s}` is not a number")).into())
}

/// `gaussian[:var=v]`, `rademacher`, `uniform:w` (half-width), or
/// `discrete:x1@p1,x2@p2,...`.
pub fn parse_scalar_prior(s: &str) -> Result<ScalarPrior> {
    let (head, args) = s.split_once(':').unwrap_or((s, ""));
    let args = args.trim();
    let prior = match head.trim() {
        "gaussian" | "normal" => {
            let var = match args {
                "" => 1.0,
                a => number(a.strip_prefix("var=").unwrap_or(a))?,
            };
            ScalarPrior::gaussian(var)?
        }
        "rademacher" if args.is_empty() => ScalarPrior::rademacher(),
        "uniform" => number(args.strip_prefix("w=").unwrap_or(args)).and_then(|w| Ok(ScalarPrior::uniform(w)?))?,
        "discrete" => {
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for item in args.split(',') {
                let (x, p) =
                    item.split_once('@').ok_or_else(|| InvalidInput(format!("discrete atom `{item}` needs x@p")))?;
                points.push(number(x)?);
                weights.push(number(p)?);
            }
            ScalarPrior::discrete(&points, &weights)?
        }
        _ => return Err(InvalidInput(format!("unknown scalar prior `{s}`")).into()),
    };
    Ok(prior)
}

/// `wigner`, `uniform:a,b`, or any spectral prior (shorthand or file) for
/// rotation-invariant noise with i.i.d. eigenvalues.
pub fn parse_noise(s: &str) -> Result<NoiseKind> {
    let t = s.trim();
    if t == "wigner" || t == "goe" {
        return Ok(NoiseKind::Wigner);
    }
    if let Some(args) = t.strip_prefix("uniform:") {
        let (a, b) = args.split_once(',').ok_or_else(|| InvalidInput(format!("uniform noise `{s}` needs a,b")))?;
        let (a, b) = (number(a)?, number(b)?);
        if !(a < b) {
            return Err(InvalidInput("uniform noise needs a < b".into()).into());
        }
        return Ok(NoiseKind::UniformSpectrum { a, b });
    }
    Ok(NoiseKind::RotInv(PriorSource::parse(t)?.measure()?))
}

pub fn sublinear_noise(noise: &NoiseKind) -> SublinearNoise {
    match noise {
        NoiseKind::Wigner => SublinearNoise::Wigner,
        NoiseKind::UniformSpectrum { a, b } => SublinearNoise::UniformSpectrum { a: *a, b: *b },
        NoiseKind::RotInv(m) => SublinearNoise::Generic(m.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdenoise_core::theory::PriorLaw;

    #[test]
    fn scalar_priors() {
        assert_eq!(parse_scalar_prior("gaussian").unwrap().variance(), 1.0);
        assert_eq!(parse_scalar_prior("gaussian:var=2").unwrap().variance(), 2.0);
        assert!(matches!(parse_scalar_prior("rademacher").unwrap().law(), PriorLaw::Rademacher));
        assert!((parse_scalar_prior("uniform:3").unwrap().variance() - 3.0).abs() < 1e-12);
        let d = parse_scalar_prior("discrete:-1@0.25,0@0.5,1@0.25").unwrap();
        assert!((d.variance() - 0.5).abs() < 1e-12);
        assert!(parse_scalar_prior("cauchy").is_err());
        assert!(parse_scalar_prior("gaussian:var=-1").is_err());
    }

    #[test]
    fn noises() {
        assert!(matches!(parse_noise("wigner").unwrap(), NoiseKind::Wigner));
        assert!(
            matches!(parse_noise("uniform:1,2").unwrap(), NoiseKind::UniformSpectrum { a, b } if a == 1.0 && b == 2.0)
        );
        assert!(parse_noise("uniform:2,1").is_err());
        assert!(matches!(parse_noise("mp:q=0.5").unwrap(), NoiseKind::RotInv(_)));
    }
}
