//! Free additive convolution with the standard semicircle through Biane's
//! subordination functions `v(u)` and `psi(u)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Density, Grid, Interval, SpectralMeasure};
use crate::error::{invalid, Error, Result};
use crate::numerics::{Panel, Quadrature};

/// Tabulated `u -> (v(u), psi(u))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinationMap {
    pub u_grid: Vec<f64>,
    pub v_values: Vec<f64>,
    pub psi_values: Vec<f64>,
}

/// Pointwise evaluation of the subordination functions for a base measure.
#[derive(Debug, Clone)]
pub struct Subordinator {
    base: SpectralMeasure,
    quad: Quadrature,
}

impl Subordinator {
    pub fn new(base: SpectralMeasure) -> Result<Self> {
        let h = base.hull();
        if !h.lo.is_finite() || !h.hi.is_finite() {
            return Err(invalid("base measure must have bounded support"));
        }
        let mass = base.mass()?;
        if (mass - 1.0).abs() > super::MASS_TOLERANCE {
            return Err(invalid(alloc::format!("base measure has mass {mass}")));
        }
        Ok(Subordinator { base, quad: Quadrature::with_rel_tol(1e-12).abs_tol(1e-15) })
    }

    pub fn base(&self) -> &SpectralMeasure {
        &self.base
    }

    fn panels_at(&self, u: f64) -> Vec<Panel> {
        let mut out = Vec::new();
        for iv in self.base.support() {
            if u > iv.lo && u < iv.hi {
                out.push(Panel { lo: iv.lo, hi: u, sqrt_lo: true, sqrt_hi: false });
                out.push(Panel { lo: u, hi: iv.hi, sqrt_lo: false, sqrt_hi: true });
            } else {
                out.push(Panel::edges(iv.lo, iv.hi));
            }
        }
        out
    }

    /// `int m(dx) / ((u - x)^2 + w^2)`.
    pub fn kernel(&self, u: f64, w: f64) -> f64 {
        let w2 = w * w;
        let mut s: f64 = self.base.atoms().iter().map(|a| a.weight / ((u - a.location).powi(2) + w2)).sum();
        if let Some(d) = self.base.density() {
            let r = self.quad.integrate_panels(|x| d.eval(x) / ((u - x).powi(2) + w2), &self.panels_at(u));
            s += match r {
                Ok(v) => v,
                Err(Error::Accuracy { estimate, .. }) => estimate,
                Err(_) => f64::INFINITY,
            };
        }
        s
    }

    /// Whether the `w -> 0+` limit of [`Self::kernel`] exceeds one.
    pub fn is_inside(&self, u: f64) -> bool {
        if self.base.atoms().iter().any(|a| a.location == u) {
            return true;
        }
        if self.base.support().iter().any(|iv| iv.contains(u)) {
            return true;
        }
        self.kernel(u, 0.0) > 1.0
    }

    /// `v(u)`, by bisection on `[0, 1]`.
    pub fn v(&self, u: f64) -> f64 {
        if !self.is_inside(u) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if self.kernel(u, mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `psi(u)` given `v = v(u)`.
    pub fn psi_with(&self, u: f64, v: f64) -> f64 {
        let v2 = v * v;
        let mut s: f64 =
            self.base.atoms().iter().map(|a| a.weight * (u - a.location) / ((u - a.location).powi(2) + v2)).sum();
        if let Some(d) = self.base.density() {
            let r = self.quad.integrate_panels(
                |x| if x == u { 0.0 } else { d.eval(x) * (u - x) / ((u - x).powi(2) + v2) },
                &self.panels_at(u),
            );
            s += match r {
                Ok(v) | Err(Error::Accuracy { estimate: v, .. }) => v,
                Err(_) => f64::NAN,
            };
        }
        u + s
    }

    pub fn psi(&self, u: f64) -> f64 {
        self.psi_with(u, self.v(u))
    }

    /// `(v, psi)` at `u`.
    pub fn eval(&self, u: f64) -> (f64, f64) {
        let v = self.v(u);
        (v, self.psi_with(u, v))
    }
}

/// Density of `m` convolved with the semicircle, with exact point evaluation.
#[derive(Debug, Clone)]
pub struct FreeConvolution {
    sub: Subordinator,
    /// Per component: `u` nodes with their `psi` values.
    runs: Vec<(Vec<f64>, Vec<f64>)>,
    support: Vec<Interval>,
}

impl FreeConvolution {
    pub fn subordinator(&self) -> &Subordinator {
        &self.sub
    }

    /// `u` with `psi(u) = x` inside component `k`, by bisection.
    fn invert(&self, k: usize, x: f64) -> f64 {
        let (us, ps) = &self.runs[k];
        let j = ps.partition_point(|&p| p <= x).clamp(1, ps.len() - 1);
        let (mut lo, mut hi) = (us[j - 1], us[j]);
        let tol = 1e-13 * (1.0 + lo.abs().max(hi.abs()));
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.sub.psi(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl Density for FreeConvolution {
    fn eval(&self, x: f64) -> f64 {
        for (k, iv) in self.support.iter().enumerate() {
            if x > iv.lo && x < iv.hi {
                return self.sub.v(self.invert(k, x)) / PI;
            }
        }
        0.0
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }

    fn mass(&self) -> Option<f64> {
        Some(1.0)
    }

    fn scan_points(&self) -> usize {
        if self.sub.base.density().is_some() {
            64
        } else {
            1000
        }
    }
}

const INITIAL_NODES: usize = 401;
const MAX_NODES: usize = 40_000;

/// `m` convolved with the standard semicircle, with its subordination map.
pub fn free_convolve_semicircle(m: &SpectralMeasure) -> Result<(SpectralMeasure, SubordinationMap)> {
    let sub = Subordinator::new(m.clone())?;
    let h = m.hull();
    let (a, b) = (h.lo - 1.0 - 1e-9, h.hi + 1.0 + 1e-9);
    let step = (b - a) / (INITIAL_NODES - 1) as f64;
    let us: Vec<f64> = (0..INITIAL_NODES).map(|k| a + step * k as f64).collect();
    let inside: Vec<bool> = us.iter().map(|&u| sub.is_inside(u)).collect();

    let edge = |lo: f64, hi: f64, rising: bool| {
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > 1e-14 * (1.0 + lo.abs()) {
            let mid = 0.5 * (lo + hi);
            if sub.is_inside(mid) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if rising {
            lo
        } else {
            hi
        }
    };

    // maximal u-runs where v > 0, bounded by edges where v vanishes
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    let mut start = None;
    for k in 1..us.len() {
        if inside[k] && !inside[k - 1] {
            start = Some(edge(us[k - 1], us[k], true));
        } else if !inside[k] && inside[k - 1] {
            let s = start.take().ok_or_else(|| Error::Internal("unbalanced support edges".into()))?;
            bounds.push((s, edge(us[k - 1], us[k], false)));
        }
    }
    if bounds.is_empty() {
        return Err(Error::Internal("empty support after convolution".into()));
    }

    let mut runs = Vec::new();
    for &(lo, hi) in &bounds {
        let mut nodes: Vec<(f64, f64, f64)> = Vec::new();
        nodes.push((lo, 0.0, sub.psi_with(lo, 0.0)));
        for &u in us.iter().filter(|&&u| u > lo && u < hi) {
            let (v, p) = sub.eval(u);
            nodes.push((u, v, p));
        }
        nodes.push((hi, 0.0, sub.psi_with(hi, 0.0)));
        runs.push(nodes);
    }

    // refine until psi increments are below 1/2000 of its range
    loop {
        let pmin = runs.iter().map(|r| r[0].2).fold(f64::INFINITY, f64::min);
        let pmax = runs.iter().map(|r| r[r.len() - 1].2).fold(f64::NEG_INFINITY, f64::max);
        let target = (pmax - pmin) / 2000.0;
        let total: usize = runs.iter().map(|r| r.len()).sum();
        let mut changed = false;
        for r in runs.iter_mut() {
            let mut out = Vec::with_capacity(r.len() * 2);
            for w in r.windows(2) {
                out.push(w[0]);
                if (w[1].2 - w[0].2).abs() > target && total < MAX_NODES && w[1].0 - w[0].0 > 1e-12 {
                    let u = 0.5 * (w[0].0 + w[1].0);
                    let (v, p) = sub.eval(u);
                    out.push((u, v, p));
                    changed = true;
                }
            }
            out.push(r[r.len() - 1]);
            *r = out;
        }
        if !changed {
            break;
        }
    }

    let mut map = SubordinationMap { u_grid: Vec::new(), v_values: Vec::new(), psi_values: Vec::new() };
    let mut gx = Vec::new();
    let mut grho = Vec::new();
    let mut support = Vec::new();
    let mut tab = Vec::new();
    for r in &runs {
        for &(u, v, p) in r {
            map.u_grid.push(u);
            map.v_values.push(v);
            map.psi_values.push(p);
            if gx.last().map_or(true, |&l| p > l) {
                gx.push(p);
                grho.push(v / PI);
            }
        }
        // components that merge at this gamma may overlap by rounding
        let lo = support.last().map_or(r[0].2, |l: &Interval| r[0].2.max(l.hi));
        support.push(Interval::new(lo, r[r.len() - 1].2));
        tab.push((r.iter().map(|n| n.0).collect(), r.iter().map(|n| n.2).collect()));
    }
    let grid = Grid::new(gx, grho, Some(support.clone()))?;
    let density = FreeConvolution { sub, runs: tab, support };
    let measure = SpectralMeasure::new_unchecked(vec![], Some(Arc::new(density))).with_grid(grid);
    Ok((measure, map))
}
