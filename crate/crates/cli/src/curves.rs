//! MMSE / MI curves and the derivative analysis around a critical SNR.

use std::path::Path;

use anyhow::Result;
use mdenoise_core::measures::{critical_gamma, MeasureSpec};
use mdenoise_core::numerics::{fit_log_singularity_with, five_point_d1, five_point_d2, LogBase, StencilGrid};
use mdenoise_core::theory::{mi_linear, mmse_linear, rademacher_mmse_expansion};
use serde::{Deserialize, Serialize};

use crate::io::PriorSource;
use crate::InvalidInput;

/// Either value is empty when its evaluation failed; the reason goes in
/// `warning`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub gamma: f64,
    pub mmse: Option<f64>,
    pub mi: Option<f64>,
    pub warning: String,
}

/// `min, min + step, ...` up to `max` (inclusive within rounding).
pub fn gamma_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && step > 0.0) || !max.is_finite() {
        return Err(InvalidInput("gamma grid needs 0 < min <= max and step > 0".into()).into());
    }
    let k = ((max - min) / step + 1e-9).floor() as usize;
    if k > 1_000_000 {
        return Err(InvalidInput("gamma grid is too fine".into()).into());
    }
    Ok((0..=k).map(|i| min + step * i as f64).collect())
}

/// Per-row failures are recorded in the warning column.
pub fn curve(source: &PriorSource, gammas: &[f64]) -> Vec<CurveRow> {
    gammas
        .iter()
        .map(|&gamma| {
            let mut row = CurveRow { gamma, mmse: None, mi: None, warning: String::new() };
            match source.rho_y(gamma) {
                Ok(rho) => {
                    let mut errs = Vec::new();
                    match mmse_linear(&rho, gamma) {
                        Ok(v) => row.mmse = Some(v),
                        Err(e) => errs.push(format!("mmse: {e}")),
                    }
                    match mi_linear(&rho) {
                        Ok(v) => row.mi = Some(v),
                        Err(e) => errs.push(format!("mi: {e}")),
                    }
                    row.warning = errs.join("; ");
                }
                Err(e) => row.warning = format!("error: {e:#}"),
            }
            row
        })
        .collect()
}

pub fn write_curve<W: std::io::Write>(out: W, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub gamma: f64,
    pub mmse: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub warning: String,
}

/// Least-squares singularity fits around `gamma_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionFit {
    pub gamma_c: f64,
    pub h: f64,
    /// `g / (gamma - gamma_c) = a log10|gamma - gamma_c| + a b` with
    /// `g = MMSE''(gamma) - MMSE''(gamma_c)`.
    pub a: f64,
    pub b: f64,
    pub residual: f64,
    /// `f / (gamma - gamma_c)^3 = alpha ln|gamma - gamma_c| + alpha beta`
    /// with `f` the MMSE minus its second-order Taylor polynomial.
    pub alpha: f64,
    pub beta: f64,
    pub alpha_residual: f64,
    pub mmse_c: f64,
    pub d1_c: f64,
    pub d2_c: f64,
    /// Largest change of MMSE'' between neighbouring grid points.
    pub max_d2_jump: f64,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    mmse: f64,
    d1: f64,
    d2: f64,
}

enum Evaluator {
    /// Exact derivative integrals.
    Rademacher,
    /// Stencils of the MMSE itself at the grid step.
    Stencil(MeasureSpec),
}

impl Evaluator {
    fn mmse(spec: &MeasureSpec, g: f64) -> mdenoise_core::Result<f64> {
        mmse_linear(&spec.rho_y(g)?, g)
    }

    fn at(&self, g: f64, h: f64) -> Result<Point> {
        match self {
            Evaluator::Rademacher => {
                let e = rademacher_mmse_expansion(g)?.value;
                Ok(Point { mmse: e.mmse, d1: e.first, d2: e.second })
            }
            Evaluator::Stencil(spec) => {
                let grid = StencilGrid::try_sample(|x| Self::mmse(spec, x), g, h)?;
                Ok(Point { mmse: grid.values[2], d1: five_point_d1(&grid), d2: five_point_d2(&grid) })
            }
        }
    }
}

/// Tabulates MMSE and its derivatives on `gamma_c + k h`, `|k h| <= half_width`,
/// and fits the logarithmic singularity. The row at `gamma_c` itself is
/// moved to `gamma_c + h/2`.
pub fn transition(
    spec: &MeasureSpec,
    gamma_c: Option<f64>,
    h: f64,
    half_width: f64,
) -> Result<(Vec<TransitionRow>, TransitionFit)> {
    if !(h > 0.0) || !(half_width >= 2.0 * h) {
        return Err(InvalidInput("need h > 0 and half-width >= 2h".into()).into());
    }
    let gamma_c = match gamma_c {
        Some(g) => g,
        None => {
            let kind = spec
                .prior_kind()
                .ok_or_else(|| InvalidInput(format!("no known critical SNR for `{spec}`; pass --gamma-c")))?;
            critical_gamma(kind)?
        }
    };
    let k_max = (half_width / h + 1e-9).floor() as i64;
    if !(gamma_c - (k_max + 2) as f64 * h > 0.0) {
        return Err(InvalidInput("grid reaches gamma <= 0".into()).into());
    }
    let eval = match spec {
        MeasureSpec::Rademacher => Evaluator::Rademacher,
        s if s.has_closed_form() => Evaluator::Stencil(*s),
        s => return Err(InvalidInput(format!("transition needs a closed-form prior, got `{s}`")).into()),
    };

    let lattice: Vec<(i64, Point)> =
        (-(k_max + 2)..=(k_max + 2)).map(|k| Ok((k, eval.at(gamma_c + k as f64 * h, h)?))).collect::<Result<_>>()?;
    let at = |k: i64| lattice[(k + k_max + 2) as usize].1;
    let center = at(0);

    let mut rows = Vec::new();
    for k in -k_max..=k_max {
        let (gamma, p, d3, d4, warning) = if k == 0 {
            let g = gamma_c + 0.5 * h;
            let half: Vec<f64> = (-2..=2).map(|j| Ok(eval.at(g + j as f64 * h, h)?.d2)).collect::<Result<_>>()?;
            let grid = StencilGrid::new(g, h, [half[0], half[1], half[2], half[3], half[4]])?;
            let p = eval.at(g, h)?;
            (g, p, five_point_d1(&grid), five_point_d2(&grid), format!("shifted from {gamma_c} by h/2"))
        } else {
            let grid = StencilGrid::new(
                gamma_c + k as f64 * h,
                h,
                [at(k - 2).d2, at(k - 1).d2, at(k).d2, at(k + 1).d2, at(k + 2).d2],
            )?;
            (gamma_c + k as f64 * h, at(k), five_point_d1(&grid), five_point_d2(&grid), String::new())
        };
        rows.push(TransitionRow { gamma, mmse: p.mmse, d1: p.d1, d2: p.d2, d3, d4, warning });
    }

    let off: Vec<(f64, Point)> =
        (-k_max..=k_max).filter(|&k| k != 0).map(|k| (gamma_c + k as f64 * h, at(k))).collect();
    let gammas: Vec<f64> = off.iter().map(|(g, _)| *g).collect();
    let g: Vec<f64> = off.iter().map(|(_, p)| p.d2 - center.d2).collect();
    let fit = fit_log_singularity_with(&gammas, &g, gamma_c, 1, LogBase::Decimal)?;
    let f: Vec<f64> = off
        .iter()
        .map(|(x, p)| {
            let d = x - gamma_c;
            p.mmse - center.mmse - center.d1 * d - 0.5 * center.d2 * d * d
        })
        .collect();
    let afit = fit_log_singularity_with(&gammas, &f, gamma_c, 3, LogBase::Natural)?;
    let max_d2_jump = (-k_max..k_max).map(|k| (at(k + 1).d2 - at(k).d2).abs()).fold(0.0, f64::max);
    Ok((
        rows,
        TransitionFit {
            gamma_c,
            h,
            a: fit.a,
            b: fit.b,
            residual: fit.residual,
            alpha: afit.a,
            beta: afit.b,
            alpha_residual: afit.residual,
            mmse_c: center.mmse,
            d1_c: center.d1,
            d2_c: center.d2,
            max_d2_jump,
        },
    ))
}

pub fn write_transition(csv_path: &Path, json_path: &Path, rows: &[TransitionRow], fit: &TransitionFit) -> Result<()> {
    let mut w = csv::Writer::from_path(csv_path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    std::fs::write(json_path, serde_json::to_string_pretty(fit)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = gamma_grid(0.01, 2.0, 0.01).unwrap();
        assert_eq!(g.len(), 200);
        assert!((g[199] - 2.0).abs() < 1e-12);
        assert!(gamma_grid(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn wigner_curve_closed_forms() {
        let src = PriorSource::parse("wigner").unwrap();
        let r = &curve(&src, &[2.0])[0];
        assert!((r.mmse.unwrap() - 1.0 / 3.0).abs() < 1e-8);
        assert!((r.mi.unwrap() - 0.25 * 3f64.ln()).abs() < 1e-6);
        assert!(r.warning.is_empty());
    }

    #[test]
    fn transition_shifts_the_critical_row() {
        let (rows, fit) = transition(&MeasureSpec::Rademacher, None, 0.01, 0.03).unwrap();
        assert_eq!(rows.len(), 7);
        assert!((rows[3].gamma - 1.005).abs() < 1e-12 && !rows[3].warning.is_empty());
        assert!((fit.d1_c + 1.0 / 3.0).abs() < 1e-6);
        assert!(rows.iter().all(|r| r.d2.is_finite() && r.d3.is_finite()));
    }
}
