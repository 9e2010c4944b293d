//! Probability measures on the real line, their integral transforms, and
//! free additive convolution with the standard semicircle law.

mod bernoulli;
mod biane;
mod closed;
mod critical;
mod marchenko;
mod rademacher;
mod spec;
mod transforms;

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::numerics::{Panel, Quadrature};

pub use bernoulli::{bernoulli_rho_y, BernoulliRhoY};
pub use biane::{free_convolve_semicircle, FreeConvolution, SubordinationMap, Subordinator};
pub use closed::{ScaledDensity, Semicircle, Uniform};
pub use critical::{critical_gamma, PriorKind};
pub use marchenko::{marchenko_pastur_rho_y, MarchenkoPasturLaw, MarchenkoPasturRhoY};
pub use rademacher::{rademacher_lower_edge, rademacher_rho_y, rademacher_upper_edge, RademacherRhoY};
pub use spec::MeasureSpec;
pub(crate) use transforms::{cauchy_at_edge, log_potential_with};
pub use transforms::{
    cauchy_derivative, cauchy_transform, hilbert_transform, log_potential, support_components, support_components_with,
    Components,
};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

/// Point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Continuous part of a measure: a nonnegative function vanishing outside
/// a sorted list of disjoint closed intervals.
pub trait Density: Send + Sync + fmt::Debug {
    fn eval(&self, x: f64) -> f64;
    fn support(&self) -> &[Interval];
    /// Mass of the continuous part, when known in closed form.
    fn mass(&self) -> Option<f64> {
        None
    }
    /// Samples per support interval used when scanning for interior gaps.
    fn scan_points(&self) -> usize {
        4000
    }
}

/// Piecewise-linear tabulated density.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    support: Vec<Interval>,
}

impl Grid {
    /// Abscissae must be strictly increasing and values nonnegative. The
    /// support defaults to the hull of the abscissae.
    pub fn new(x: Vec<f64>, rho: Vec<f64>, support: Option<Vec<Interval>>) -> Result<Self> {
        if x.len() != rho.len() || x.len() < 2 {
            return Err(invalid("grid needs matching abscissae and values, at least two"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("grid abscissae must be strictly increasing"));
        }
        if rho.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(invalid("grid values must be finite and nonnegative"));
        }
        let support = match support {
            Some(s) => {
                check_intervals(&s)?;
                s
            }
            None => vec![Interval::new(x[0], x[x.len() - 1])],
        };
        Ok(Grid { x, rho, support })
    }

    /// Exact integral of the interpolant restricted to the support.
    pub fn trapezoid_mass(&self) -> f64 {
        let mut m = 0.0;
        for w in 0..self.x.len() - 1 {
            let (a, b) = (self.x[w], self.x[w + 1]);
            for iv in &self.support {
                let lo = a.max(iv.lo);
                let hi = b.min(iv.hi);
                if hi > lo {
                    m += 0.5 * (hi - lo) * (self.eval(lo) + self.eval(hi));
                }
            }
        }
        m
    }
}

impl Density for Grid {
    fn eval(&self, t: f64) -> f64 {
        if !self.support.iter().any(|iv| iv.contains(t)) {
            return 0.0;
        }
        let n = self.x.len();
        if t <= self.x[0] || t >= self.x[n - 1] {
            return if t == self.x[0] {
                self.rho[0]
            } else if t == self.x[n - 1] {
                self.rho[n - 1]
            } else {
                0.0
            };
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let s = (t - self.x[k]) / (self.x[k + 1] - self.x[k]);
        self.rho[k] + s * (self.rho[k + 1] - self.rho[k])
    }

    fn support(&self) -> &[Interval] {
        &self.support
    }
}

pub(crate) fn check_intervals(s: &[Interval]) -> Result<()> {
    for iv in s {
        if !(iv.hi > iv.lo) || !iv.lo.is_finite() || !iv.hi.is_finite() {
            return Err(invalid(format!("bad support interval [{}, {}]", iv.lo, iv.hi)));
        }
    }
    if s.windows(2).any(|w| !(w[1].lo >= w[0].hi)) {
        return Err(invalid("support intervals must be sorted and disjoint"));
    }
    Ok(())
}

/// Probability measure: finitely many atoms plus an optional density.
#[derive(Clone)]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
    density: Option<Arc<dyn Density>>,
    grid: Option<Arc<Grid>>,
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralMeasure")
            .field("atoms", &self.atoms)
            .field("support", &self.support())
            .field("tabulated", &self.grid.is_some())
            .finish()
    }
}

/// Tolerance on total mass accepted by the constructors.
pub const MASS_TOLERANCE: f64 = 1e-8;

impl SpectralMeasure {
    /// Validating constructor.
    pub fn new(atoms: Vec<Atom>, density: Option<Arc<dyn Density>>) -> Result<Self> {
        let m = Self::new_unchecked(atoms, density);
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(mut atoms: Vec<Atom>, density: Option<Arc<dyn Density>>) -> Self {
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        SpectralMeasure { atoms, density, grid: None }
    }

    fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !(a.weight > 0.0 && a.weight <= 1.0) || !a.location.is_finite() {
                return Err(invalid(format!("bad atom ({}, {})", a.location, a.weight)));
            }
        }
        if self.atoms.windows(2).any(|w| w[0].location == w[1].location) {
            return Err(invalid("duplicate atom locations"));
        }
        if let Some(d) = &self.density {
            check_intervals(d.support())?;
        }
        let mass = self.mass()?;
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(format!("total mass {mass} differs from one")));
        }
        Ok(())
    }

    /// Standard semicircle law with the given variance.
    pub fn semicircle(variance: f64) -> Result<Self> {
        Ok(Self::new_unchecked(vec![], Some(Arc::new(Semicircle::new(variance)?))))
    }

    /// Uniform law on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Ok(Self::new_unchecked(vec![], Some(Arc::new(Uniform::new(a, b)?))))
    }

    /// Dirac mass.
    pub fn delta(x: f64) -> Result<Self> {
        Self::atomic(&[(x, 1.0)])
    }

    /// Purely atomic measure from `(location, weight)` pairs.
    pub fn atomic(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(points.iter().map(|&(location, weight)| Atom { location, weight }).collect(), None)
    }

    /// `(delta_{-1} + delta_{+1}) / 2`.
    pub fn rademacher() -> Self {
        Self::new_unchecked(vec![Atom { location: -1.0, weight: 0.5 }, Atom { location: 1.0, weight: 0.5 }], None)
    }

    /// `p delta_0 + (1 - p) delta_1`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid("bernoulli weight must lie in (0, 1)"));
        }
        Ok(Self::new_unchecked(vec![Atom { location: 0.0, weight: p }, Atom { location: 1.0, weight: 1.0 - p }], None))
    }

    /// Marchenko-Pastur law of ratio `q` (mean `1/q`, atom `1 - 1/q` at zero when `q > 1`).
    pub fn marchenko_pastur(q: f64) -> Result<Self> {
        let law = MarchenkoPasturLaw::new(q)?;
        let atoms = if q > 1.0 { vec![Atom { location: 0.0, weight: 1.0 - 1.0 / q }] } else { vec![] };
        Ok(Self::new_unchecked(atoms, Some(Arc::new(law))))
    }

    /// Measure with a tabulated (piecewise-linear) density.
    pub fn from_grid(grid: Grid) -> Result<Self> {
        let g = Arc::new(grid);
        let mut m = Self::new(vec![], Some(g.clone() as Arc<dyn Density>))?;
        m.grid = Some(g);
        Ok(m)
    }

    /// General measure with atoms and a tabulated density.
    pub fn from_parts(atoms: Vec<Atom>, grid: Option<Grid>) -> Result<Self> {
        match grid {
            None => Self::new(atoms, None),
            Some(g) => {
                let g = Arc::new(g);
                let mut m = Self::new(atoms, Some(g.clone() as Arc<dyn Density>))?;
                m.grid = Some(g);
                Ok(m)
            }
        }
    }

    pub(crate) fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = Some(Arc::new(grid));
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Arc<dyn Density>> {
        self.density.as_ref()
    }

    /// Tabulation attached to the measure, if any.
    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_deref()
    }

    /// Same measure with the density replaced by its tabulation (cheap to evaluate).
    pub fn tabulated(&self) -> Option<Self> {
        let g = self.grid.clone()?;
        Some(SpectralMeasure { atoms: self.atoms.clone(), density: Some(g.clone() as Arc<dyn Density>), grid: Some(g) })
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_none()
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Support intervals of the continuous part.
    pub fn support(&self) -> &[Interval] {
        match &self.density {
            Some(d) => d.support(),
            None => &[],
        }
    }

    /// Smallest interval containing every atom and the continuous support.
    pub fn hull(&self) -> Interval {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in &self.atoms {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        for iv in self.support() {
            lo = lo.min(iv.lo);
            hi = hi.max(iv.hi);
        }
        Interval::new(lo, hi)
    }

    /// Density value (zero for purely atomic measures).
    pub fn density_at(&self, x: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.eval(x))
    }

    pub(crate) fn panels(&self) -> Vec<Panel> {
        self.support().iter().map(|iv| Panel::edges(iv.lo, iv.hi)).collect()
    }

    /// `int f dm` with the given quadrature for the continuous part.
    pub fn integrate_with<F: FnMut(f64) -> f64>(&self, q: &Quadrature, mut f: F) -> Result<f64> {
        let mut s: f64 = self.atoms.iter().map(|a| a.weight * f(a.location)).sum();
        if let Some(d) = &self.density {
            let d = d.clone();
            s += q.integrate_panels(|x| d.eval(x) * f(x), &self.panels())?;
        }
        Ok(s)
    }

    /// `int f dm` at relative tolerance `1e-10`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.integrate_with(&Quadrature::with_rel_tol(1e-10).abs_tol(1e-14), f)
    }

    /// Total mass (one for every valid measure).
    pub fn mass(&self) -> Result<f64> {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let cont = match &self.density {
            None => 0.0,
            Some(d) => match d.mass() {
                Some(m) => m,
                None => {
                    let d = d.clone();
                    Quadrature::with_rel_tol(1e-10).integrate_panels(|x| d.eval(x), &self.panels())?
                }
            },
        };
        Ok(atoms + cont)
    }

    /// `int x^k dm`.
    pub fn moment(&self, k: i32) -> Result<f64> {
        self.integrate(|x| x.powi(k))
    }

    /// Push-forward under `x -> c x`, `c != 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(invalid("scale must be finite and nonzero"));
        }
        let atoms = self.atoms.iter().map(|a| Atom { location: c * a.location, weight: a.weight }).collect();
        let density = self.density.as_ref().map(|d| Arc::new(ScaledDensity::new(d.clone(), c)) as Arc<dyn Density>);
        Ok(Self::new_unchecked(atoms, density))
    }

    /// Cumulative distribution table for repeated CDF queries.
    pub fn cdf_table(&self) -> Result<CdfTable> {
        CdfTable::new(self)
    }
}

/// Tabulated CDF of a measure. The continuous part is integrated on a
/// cosine-clustered grid per support interval and interpolated linearly in
/// the angle variable, which resolves square-root edges.
#[derive(Debug, Clone)]
pub struct CdfTable {
    atoms: Vec<Atom>,
    pieces: Vec<(Interval, Vec<f64>)>,
}

const CDF_PANELS: usize = 1024;

impl CdfTable {
    fn new(m: &SpectralMeasure) -> Result<Self> {
        let mut pieces = Vec::new();
        if let Some(d) = m.density() {
            let q = Quadrature::with_rel_tol(1e-10).abs_tol(1e-15);
            for iv in d.support() {
                let (lo, w) = (iv.lo, iv.width());
                let f = |t: f64| {
                    let x = lo + 0.5 * w * (1.0 - t.cos());
                    d.eval(x) * 0.5 * w * t.sin()
                };
                let mut cum = Vec::with_capacity(CDF_PANELS + 1);
                let mut acc = 0.0;
                cum.push(0.0);
                let h = core::f64::consts::PI / CDF_PANELS as f64;
                for k in 0..CDF_PANELS {
                    acc += q.integrate(f, k as f64 * h, (k + 1) as f64 * h)?;
                    cum.push(acc);
                }
                pieces.push((*iv, cum));
            }
        }
        Ok(CdfTable { atoms: m.atoms.clone(), pieces })
    }

    /// `(F(x-), F(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let mut below = 0.0;
        let mut at = 0.0;
        for a in &self.atoms {
            if a.location < x {
                below += a.weight;
            } else if a.location == x {
                at += a.weight;
            }
        }
        for (iv, cum) in &self.pieces {
            if x >= iv.hi {
                below += cum[CDF_PANELS];
            } else if x > iv.lo {
                let c = 1.0 - 2.0 * (x - iv.lo) / iv.width();
                let t = c.clamp(-1.0, 1.0).acos();
                let s = t / core::f64::consts::PI * CDF_PANELS as f64;
                let k = (s.floor() as usize).min(CDF_PANELS - 1);
                let frac = s - k as f64;
                below += cum[k] + frac * (cum[k + 1] - cum[k]);
            }
        }
        (below, below + at)
    }

    /// Generalized inverse `inf {x : F(x) >= u}` for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        enum Part<'a> {
            Atom(f64, f64),
            Piece(&'a Interval, &'a [f64]),
        }
        let mut parts: Vec<(f64, Part)> =
            self.atoms.iter().map(|a| (a.location, Part::Atom(a.location, a.weight))).collect();
        parts.extend(self.pieces.iter().map(|(iv, cum)| (iv.lo, Part::Piece(iv, cum.as_slice()))));
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = parts
            .iter()
            .map(|(_, p)| match p {
                Part::Atom(_, w) => *w,
                Part::Piece(_, cum) => cum[CDF_PANELS],
            })
            .sum();
        let mut left = u.clamp(0.0, 1.0) * total;
        let mut last = 0.0;
        for (_, p) in &parts {
            match p {
                Part::Atom(x, w) => {
                    last = *x;
                    if left <= *w {
                        return *x;
                    }
                    left -= w;
                }
                Part::Piece(iv, cum) => {
                    last = iv.hi;
                    let mass = cum[CDF_PANELS];
                    if left <= mass {
                        let k = cum.partition_point(|&c| c < left).clamp(1, CDF_PANELS);
                        let (c0, c1) = (cum[k - 1], cum[k]);
                        let frac = if c1 > c0 { (left - c0) / (c1 - c0) } else { 0.0 };
                        let t = (k as f64 - 1.0 + frac) * core::f64::consts::PI / CDF_PANELS as f64;
                        return iv.lo + 0.5 * iv.width() * (1.0 - t.cos());
                    }
                    left -= mass;
                }
            }
        }
        last
    }
}

/// Kolmogorov-Smirnov distance between an empirical sample and a measure.
pub fn ks_distance_to(sample: &[f64], m: &SpectralMeasure) -> Result<f64> {
    let t = m.cdf_table()?;
    crate::numerics::ks_distance(sample, |x| t.eval(x))
}
