//! Closed convex hulls and e-convex hulls of piecewise polynomials.
//!
//! The closed convex hull `f**` is built as a lower envelope: convex arcs of
//! `f` that touch the envelope are kept verbatim, the gaps between them are
//! common tangents found by slope bisection, and unbounded sides end either in
//! the original superlinear tail or in a ray whose slope is an endpoint of
//! `dom f*`. In one dimension the e-convex hull is `f**` with the endpoint
//! membership of `dom f`.

use serde::{Deserialize, Serialize};

use crate::conj::conjugate_domain;
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Interval};
use crate::numeric::linspace;
use crate::poly::Poly;
use crate::pwfn::{Piece, PiecewiseFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Every piece is an original piece or an exact supporting ray.
    ClosedForm,
    /// At least one bridge slope was located numerically.
    Grid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HullResult {
    pub func: PiecewiseFn,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullConfig {
    /// Half-width of the sampling window for unbounded domains.
    pub window: f64,
    /// Sample count across the bounded core.
    pub nodes: usize,
}

impl Default for HullConfig {
    fn default() -> Self {
        HullConfig { window: 16.0, nodes: 2049 }
    }
}

const TIE_TOL: f64 = 1e-12;

/// `min_{x in region} (lsc f)(x) - m x` with the leftmost and rightmost minimisers.
fn tilted_min(f: &PiecewiseFn, m: f64, region: &Interval) -> Option<(f64, f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    for p in f.pieces() {
        let cl = p.interval.closure().intersect(region);
        if cl.is_empty() {
            continue;
        }
        let q = p.poly.tilt(m);
        let (v, lo_arg, hi_arg) = if q.degree() == 0 {
            (q.eval(0.0), cl.lo(), cl.hi())
        } else {
            let r = q.infimum_on(&cl);
            match (r.value, r.argmin) {
                (ExtReal::Finite(v), Some(x)) => (v, x, x),
                _ => continue,
            }
        };
        best = Some(match best {
            None => (v, lo_arg, hi_arg),
            Some((bv, bl, bh)) => {
                let tol = TIE_TOL * (1.0 + bv.abs().max(v.abs()));
                if v < bv - tol {
                    (v, lo_arg, hi_arg)
                } else if v <= bv + tol {
                    (bv.min(v), bl.min(lo_arg), bh.max(hi_arg))
                } else {
                    (bv, bl, bh)
                }
            }
        });
    }
    best
}

/// Common supporting line across `mid`: slope, intercept and touch points.
fn refine_bridge(f: &PiecewiseFn, core: &Interval, mid: f64, m0: f64) -> (f64, f64, f64, f64) {
    let left = core.intersect(&Interval::at_most(mid, true));
    let right = core.intersect(&Interval::at_least(mid, true));
    let gap = |m: f64| {
        let l = tilted_min(f, m, &left).map_or(f64::INFINITY, |r| r.0);
        let r = tilted_min(f, m, &right).map_or(f64::INFINITY, |r| r.0);
        l - r
    };
    let mut step = 1e-6 * (1.0 + m0.abs());
    let (mut lo, mut hi) = (m0 - step, m0 + step);
    for _ in 0..200 {
        if gap(lo) <= 0.0 {
            break;
        }
        step *= 2.0;
        lo = m0 - step;
    }
    step = 1e-6 * (1.0 + m0.abs());
    for _ in 0..200 {
        if gap(hi) >= 0.0 {
            break;
        }
        step *= 2.0;
        hi = m0 + step;
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if gap(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let m = 0.5 * (lo + hi);
    let (lv, _, tl) = tilted_min(f, m, &left).expect("left side of a bridge is non-empty");
    let (rv, tr, _) = tilted_min(f, m, &right).expect("right side of a bridge is non-empty");
    (m, 0.5 * (lv + rv), tl, tr)
}

enum Seg {
    Follow { poly: Poly, hi: f64 },
    Bridge { m: f64, c: f64, lo: f64, hi: f64 },
}

/// Lower monotone chain; returns vertex indices.
fn lower_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(pts.len());
    for k in 0..pts.len() {
        while h.len() >= 2 {
            let (o, a, b) = (pts[h[h.len() - 2]], pts[h[h.len() - 1]], pts[k]);
            let cross = (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
            let scale = ((a.0 - o.0).abs() + (b.0 - o.0).abs()) * (o.1.abs() + a.1.abs() + b.1.abs() + 1.0);
            if cross <= 1e-15 * scale {
                h.pop();
            } else {
                break;
            }
        }
        h.push(k);
    }
    h
}

fn piece_with_closure(f: &PiecewiseFn, a: f64, b: f64) -> Option<&Piece> {
    f.pieces().iter().find(|p| {
        let cl = p.interval.closure();
        cl.contains(a) && cl.contains(b)
    })
}

/// Largest closed convex minorant `f**`.
pub fn convex_lsc_hull(f: &PiecewiseFn) -> Result<HullResult> {
    convex_lsc_hull_with(f, &HullConfig::default())
}

pub fn convex_lsc_hull_with(f: &PiecewiseFn, cfg: &HullConfig) -> Result<HullResult> {
    let sdom = conjugate_domain(f);
    if sdom.is_empty() {
        return Err(Error::NoMinorant);
    }
    let whole = Interval::REAL_LINE;
    if sdom.is_singleton() {
        let m = sdom.lo();
        let (v, _, _) = tilted_min(f, m, &whole).ok_or(Error::NoMinorant)?;
        return Ok(HullResult { func: PiecewiseFn::affine(m, v), provenance: Provenance::ClosedForm });
    }
    let dom = f.domain_hull();
    let mut tails: Vec<Piece> = Vec::new();

    // right end of the bounded core
    let b = if dom.hi().is_finite() {
        dom.hi()
    } else if sdom.hi().is_finite() {
        let m = sdom.hi();
        let (v, start, _) = tilted_min(f, m, &whole).ok_or(Error::NoMinorant)?;
        tails.push(Piece::new(Interval::at_least(start, false), Poly::linear(m, v)));
        start
    } else {
        let tail = &f.pieces()[f.pieces().len() - 1];
        let x = tangent_start(f, &tail.poly, tail.interval.lo(), cfg.window, true);
        tails.push(Piece::new(Interval::at_least(x, false), tail.poly.clone()));
        x
    };
    let a = if dom.lo().is_finite() {
        dom.lo()
    } else if sdom.lo().is_finite() {
        let m = sdom.lo();
        let (v, _, end) = tilted_min(f, m, &whole).ok_or(Error::NoMinorant)?;
        tails.push(Piece::new(Interval::at_most(end, false), Poly::linear(m, v)));
        end
    } else {
        let tail = &f.pieces()[0];
        let x = tangent_start(f, &tail.poly, tail.interval.hi(), cfg.window, false);
        tails.push(Piece::new(Interval::at_most(x, false), tail.poly.clone()));
        x
    };
    let core = Interval::closed(a, b);

    let mut xs = vec![a, b];
    for p in f.pieces() {
        let cl = p.interval.closure().intersect(&core);
        if cl.is_empty() {
            continue;
        }
        xs.push(cl.lo());
        xs.push(cl.hi());
        if cl.is_singleton() {
            continue;
        }
        let share = if b > a { (cl.hi() - cl.lo()) / (b - a) } else { 1.0 };
        let n = ((cfg.nodes as f64 * share) as usize).max(9);
        xs.extend(linspace(cl.lo(), cl.hi(), n));
        let d1 = p.poly.derivative();
        xs.extend(d1.roots_in(cl.lo(), cl.hi()));
        xs.extend(d1.derivative().roots_in(cl.lo(), cl.hi()));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .filter_map(|&x| f.lsc_value(x).finite().map(|y| (x, y)))
        .collect();
    let verts = lower_hull(&pts);

    let mut segs: Vec<Seg> = Vec::new();
    let mut numeric = false;
    for w in verts.windows(2) {
        let ((xa, ya), (xb, yb)) = (pts[w[0]], pts[w[1]]);
        let follow = piece_with_closure(f, xa, xb).filter(|p| {
            let curv = p.poly.derivative().derivative().infimum_on(&Interval::closed(xa, xb)).value;
            let scale = 1.0 + ya.abs().max(yb.abs());
            curv >= ExtReal::Finite(-1e-12 * (1.0 + p.poly.leading().abs()))
                && (p.poly.eval(xa) - ya).abs() <= 1e-12 * scale
                && (p.poly.eval(xb) - yb).abs() <= 1e-12 * scale
        });
        match follow {
            Some(p) => segs.push(Seg::Follow { poly: p.poly.clone(), hi: xb }),
            None => {
                numeric = true;
                let m0 = (yb - ya) / (xb - xa);
                let (m, c, lo, hi) = refine_bridge(f, &core, 0.5 * (xa + xb), m0);
                segs.push(Seg::Bridge { m, c, lo, hi });
            }
        }
    }

    let mut pieces = tails;
    if segs.is_empty() {
        let v = f.lsc_value(a).finite().ok_or(Error::NoMinorant)?;
        pieces.push(Piece::new(Interval::point(a), Poly::constant(v)));
    } else {
        let mut bounds = vec![a];
        for k in 1..segs.len() {
            let t = match (&segs[k - 1], &segs[k]) {
                (Seg::Bridge { hi, .. }, _) => *hi,
                (_, Seg::Bridge { lo, .. }) => *lo,
                (Seg::Follow { hi, .. }, _) => *hi,
            };
            bounds.push(t.max(*bounds.last().unwrap()).min(b));
        }
        bounds.push(b);
        for (k, s) in segs.iter().enumerate() {
            let iv = Interval::new(bounds[k], k == 0, bounds[k + 1], true);
            let poly = match s {
                Seg::Follow { poly, .. } => poly.clone(),
                Seg::Bridge { m, c, .. } => Poly::linear(*m, *c),
            };
            pieces.push(Piece::new(iv, poly));
        }
    }
    let func = PiecewiseFn::new(absorb_points(pieces))?;
    Ok(HullResult { func, provenance: if numeric { Provenance::Grid } else { Provenance::ClosedForm } })
}

/// Smallest `x` (or largest, for the left side) beyond which the convex tail
/// `p` touches `f**`: its tangent there minorises the whole of `lsc f`.
fn tangent_start(f: &PiecewiseFn, p: &Poly, knot: f64, window: f64, right: bool) -> f64 {
    let sign = if right { 1.0 } else { -1.0 };
    let mut x = sign * window;
    if knot.is_finite() {
        x = if right { x.max(knot + 1.0) } else { x.min(knot - 1.0) };
    }
    for r in p.derivative().derivative().roots_in(f64::NEG_INFINITY, f64::INFINITY) {
        x = if right { x.max(r + 1.0) } else { x.min(r - 1.0) };
    }
    for _ in 0..60 {
        let s = p.derivative().eval(x);
        let here = p.eval(x) - s * x;
        match tilted_min(f, s, &Interval::REAL_LINE) {
            Some((v, _, _)) if here <= v + 1e-10 * (1.0 + v.abs()) => return x,
            _ => x *= 2.0,
        }
    }
    x
}

/// Gives singleton pieces the polynomial of a neighbour that agrees at the point.
fn absorb_points(mut pieces: Vec<Piece>) -> Vec<Piece> {
    pieces.retain(|p| !p.interval.is_empty());
    pieces.sort_by(|a, b| a.interval.lo().total_cmp(&b.interval.lo()));
    for k in 0..pieces.len() {
        if !pieces[k].interval.is_singleton() {
            continue;
        }
        let x = pieces[k].interval.lo();
        let v = pieces[k].poly.eval(x);
        let agree = |q: &Poly| (q.eval(x) - v).abs() <= 1e-12 * (1.0 + v.abs());
        if k + 1 < pieces.len() && agree(&pieces[k + 1].poly) {
            pieces[k].poly = pieces[k + 1].poly.clone();
        } else if k > 0 && agree(&pieces[k - 1].poly) {
            pieces[k].poly = pieces[k - 1].poly.clone();
        }
    }
    pieces
}

/// Largest e-convex minorant: `f**` on the interior of `dom f`, with each
/// finite endpoint kept iff it belongs to `dom f`.
pub fn eco_hull(f: &PiecewiseFn) -> Result<HullResult> {
    eco_hull_with(f, &HullConfig::default())
}

pub fn eco_hull_with(f: &PiecewiseFn, cfg: &HullConfig) -> Result<HullResult> {
    let h = convex_lsc_hull_with(f, cfg)?;
    Ok(HullResult { func: h.func.restrict(&f.domain_hull())?, provenance: h.provenance })
}

/// Whether `f` equals its e-convex hull on its domain.
pub fn is_econvex(f: &PiecewiseFn) -> bool {
    let Ok(eco) = eco_hull(f) else {
        return false;
    };
    if eco.func.domain_hull() != f.domain_hull() || !f.has_interval_domain() {
        return false;
    }
    let mut knots = f.breakpoints();
    knots.extend(eco.func.breakpoints());
    knots.sort_by(f64::total_cmp);
    let mut xs = knots.clone();
    xs.extend(knots.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    for p in f.pieces() {
        let iv = p.interval;
        let (lo, hi) = (iv.lo().max(-64.0), iv.hi().min(64.0));
        if lo < hi {
            xs.extend(linspace(lo, hi, 257));
        }
    }
    xs.into_iter().filter(|&x| f.in_domain(x)).all(|x| eco.func.eval(x).approx_eq(f.eval(x), 1e-9))
}
