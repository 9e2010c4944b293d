//! Adaptive Gauss-Legendre quadrature with global error control.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

// 15-point Gauss-Legendre rule on [-1, 1], nonnegative half.
const GL15: [(f64, f64); 8] = [
    (0.0, 0.20257824192556127288),
    (2.011940939974345223e-1, 0.19843148532711157646),
    (3.941513470775633699e-1, 0.18616100001556221103),
    (5.7097217260853884754e-1, 0.16626920581699393355),
    (7.2441773136017004742e-1, 0.13957067792615431445),
    (8.482065834104272162e-1, 0.10715922046717193501),
    (9.3727339240070590431e-1, 0.070366047488108124709),
    (9.8799251802048542849e-1, 0.030753241996117268355),
];

#[inline]
fn gl15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = GL15[0].1 * f(c);
    for &(x, w) in &GL15[1..] {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}

/// A finite integration panel. A flagged endpoint gets the substitution
/// `t = edge +- u^2`, which removes square-root (and softens logarithmic)
/// endpoint behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub sqrt_lo: bool,
    pub sqrt_hi: bool,
}

impl Panel {
    pub fn plain(lo: f64, hi: f64) -> Self {
        Panel { lo, hi, sqrt_lo: false, sqrt_hi: false }
    }

    pub fn edges(lo: f64, hi: f64) -> Self {
        Panel { lo, hi, sqrt_lo: true, sqrt_hi: true }
    }
}

#[derive(Clone, Copy)]
enum Map {
    Id,
    FromLo(f64),
    FromHi(f64),
}

impl Map {
    #[inline]
    fn apply<F: FnMut(f64) -> f64>(self, f: &mut F, u: f64) -> f64 {
        match self {
            Map::Id => f(u),
            Map::FromLo(e) => 2.0 * u * f(e + u * u),
            Map::FromHi(e) => 2.0 * u * f(e - u * u),
        }
    }
}

struct Segment {
    map: Map,
    sign: f64,
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive quadrature driver.
///
/// Every segment carries a 15-point estimate of itself and of its two halves;
/// the difference is the error indicator, and the segment with the largest
/// indicator is bisected until the global sum meets `max(abs_tol, rel_tol*|I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub max_segments: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { rel_tol: 1e-9, abs_tol: 1e-15, max_depth: 60, max_segments: 200_000 }
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Quadrature { rel_tol, ..Default::default() }
    }

    pub fn abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Integral over `[a, b]` without endpoint treatment.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_panels(f, &[Panel::plain(a, b)])
    }

    /// Integral over `[a, b]` with the square-root substitution at both ends.
    pub fn integrate_edges<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_panels(f, &[Panel::edges(a, b)])
    }

    /// Sum of the integrals over all panels, under one global tolerance.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, panels: &[Panel]) -> Result<f64> {
        let mut heap = BinaryHeap::new();
        for p in panels {
            let (lo, hi, sign) = if p.hi >= p.lo { (p.lo, p.hi, 1.0) } else { (p.hi, p.lo, -1.0) };
            if !(hi > lo) {
                continue;
            }
            let (sl, sh) = if sign > 0.0 { (p.sqrt_lo, p.sqrt_hi) } else { (p.sqrt_hi, p.sqrt_lo) };
            let mut pieces: Vec<(Map, f64, f64)> = Vec::with_capacity(2);
            let mid = 0.5 * (lo + hi);
            match (sl, sh) {
                (false, false) => pieces.push((Map::Id, lo, hi)),
                (true, false) => pieces.push((Map::FromLo(lo), 0.0, (hi - lo).sqrt())),
                (false, true) => pieces.push((Map::FromHi(hi), 0.0, (hi - lo).sqrt())),
                (true, true) => {
                    pieces.push((Map::FromLo(lo), 0.0, (mid - lo).sqrt()));
                    pieces.push((Map::FromHi(hi), 0.0, (hi - mid).sqrt()));
                }
            }
            for (map, a, b) in pieces {
                let mut g = |u: f64| sign * map.apply(&mut f, u);
                let whole = gl15(&mut g, a, b);
                heap.push(split(&mut g, map, sign, a, b, whole, 0));
            }
        }
        let (mut total, mut err) = sums(&heap);
        loop {
            if !total.is_finite() || !err.is_finite() {
                return Err(Error::Accuracy { estimate: total, error: err });
            }
            if err <= self.abs_tol.max(self.rel_tol * total.abs()) {
                let (t, e) = sums(&heap);
                if e <= self.abs_tol.max(self.rel_tol * t.abs()) {
                    return Ok(t);
                }
                total = t;
                err = e;
                continue;
            }
            let seg = match heap.pop() {
                Some(s) => s,
                None => return Ok(total),
            };
            if seg.depth >= self.max_depth || heap.len() >= self.max_segments {
                heap.push(seg);
                let (t, e) = sums(&heap);
                return Err(Error::Accuracy { estimate: t, error: e });
            }
            let (map, sign) = (seg.map, seg.sign);
            let mut g = |u: f64| sign * map.apply(&mut f, u);
            let m = 0.5 * (seg.a + seg.b);
            let l = split(&mut g, map, sign, seg.a, m, seg.left, seg.depth + 1);
            let r = split(&mut g, map, sign, m, seg.b, seg.right, seg.depth + 1);
            total += l.left + l.right + r.left + r.right - seg.left - seg.right;
            err += l.err + r.err - seg.err;
            heap.push(l);
            heap.push(r);
        }
    }
}

fn split<G: FnMut(f64) -> f64>(g: &mut G, map: Map, sign: f64, a: f64, b: f64, whole: f64, depth: u32) -> Segment {
    let m = 0.5 * (a + b);
    let left = gl15(g, a, m);
    let right = gl15(g, m, b);
    let err = (left + right - whole).abs();
    Segment { map, sign, a, b, left, right, err, depth }
}

fn sums(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut t = 0.0;
    let mut c = 0.0;
    let mut e = 0.0;
    for s in heap.iter() {
        // Neumaier summation keeps cancellation between panels harmless.
        let v = s.left + s.right;
        let tt = t + v;
        if t.abs() >= v.abs() {
            c += (t - tt) + v;
        } else {
            c += (v - tt) + t;
        }
        t = tt;
        e += s.err;
    }
    (t + c, e)
}
