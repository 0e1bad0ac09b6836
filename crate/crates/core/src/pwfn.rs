//! Proper functions `R -> R ∪ {+inf}` given by polynomial pieces.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::{approx_eq, ExtReal, Interval};
use crate::poly::{Poly, MAX_DEGREE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub interval: Interval,
    pub poly: Poly,
}

impl Piece {
    pub fn new(interval: Interval, poly: Poly) -> Piece {
        Piece { interval, poly }
    }
}

/// A proper piecewise-polynomial function; `+inf` off the pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFn {
    pieces: Vec<Piece>,
}

/// How zero multipliers act on a constraint function in a weighted sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroWeight {
    /// `0 * h` is the indicator of `dom h` (`0 * inf = inf`).
    #[default]
    KeepDomain,
    /// Zero-weight entries are dropped; the empty sum is `0` on `R`.
    Drop,
}

/// Result of a one-dimensional infimum; `argmin` is present iff attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Infimum {
    pub value: ExtReal,
    pub argmin: Option<f64>,
}

impl Infimum {
    pub fn attained(&self) -> bool {
        self.argmin.is_some()
    }
}

const CONVEXITY_TOL: f64 = 1e-9;

impl PiecewiseFn {
    pub fn new(mut pieces: Vec<Piece>) -> Result<PiecewiseFn> {
        pieces.retain(|p| !p.interval.is_empty());
        if pieces.is_empty() {
            return Err(Error::ImproperResult);
        }
        for p in &pieces {
            if p.poly.degree() > MAX_DEGREE {
                return Err(Error::DegreeTooHigh(p.poly.degree()));
            }
            if p.poly.coeffs().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPieces("non-finite coefficient".into()));
            }
        }
        pieces.sort_by(|a, b| {
            a.interval
                .lo()
                .total_cmp(&b.interval.lo())
                .then(b.interval.lo_closed().cmp(&a.interval.lo_closed()))
        });
        for w in pieces.windows(2) {
            if !w[0].interval.intersect(&w[1].interval).is_empty() {
                return Err(Error::InvalidPieces(format!(
                    "pieces {} and {} overlap",
                    w[0].interval, w[1].interval
                )));
            }
        }
        Ok(PiecewiseFn { pieces: merge_pieces(pieces) })
    }

    pub fn single(interval: Interval, poly: Poly) -> Result<PiecewiseFn> {
        PiecewiseFn::new(vec![Piece::new(interval, poly)])
    }

    pub fn zero() -> PiecewiseFn {
        PiecewiseFn { pieces: vec![Piece::new(Interval::REAL_LINE, Poly::zero())] }
    }

    /// Indicator of a non-empty interval (`0` on it, `+inf` elsewhere).
    pub fn indicator(dom: Interval) -> Result<PiecewiseFn> {
        if dom.is_empty() {
            return Err(Error::EmptyDomain);
        }
        PiecewiseFn::single(dom, Poly::zero())
    }

    pub fn affine(slope: f64, intercept: f64) -> PiecewiseFn {
        PiecewiseFn { pieces: vec![Piece::new(Interval::REAL_LINE, Poly::linear(slope, intercept))] }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        self.piece_at(x).map_or(ExtReal::PosInf, |p| ExtReal::Finite(p.poly.eval(x)))
    }

    fn piece_at(&self, x: f64) -> Option<&Piece> {
        let idx = self.pieces.partition_point(|p| p.interval.hi() < x || (p.interval.hi() == x && !p.interval.hi_closed()));
        self.pieces.get(idx).filter(|p| p.interval.contains(x))
    }

    /// Smallest interval containing the effective domain.
    pub fn domain_hull(&self) -> Interval {
        let first = &self.pieces[0].interval;
        let last = &self.pieces[self.pieces.len() - 1].interval;
        Interval::new(first.lo(), first.lo_closed(), last.hi(), last.hi_closed())
    }

    /// Whether the effective domain has no gaps.
    pub fn has_interval_domain(&self) -> bool {
        self.pieces.windows(2).all(|w| touching(&w[0].interval, &w[1].interval))
    }

    pub fn in_domain(&self, x: f64) -> bool {
        self.piece_at(x).is_some()
    }

    /// Finite piece endpoints, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.interval.lo(), p.interval.hi()])
            .filter(|x| x.is_finite())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Lower-semicontinuous value at `x`: the smaller of `f(x)` and the
    /// one-sided limits from pieces whose closure contains `x`.
    pub fn lsc_value(&self, x: f64) -> ExtReal {
        let mut v = self.eval(x);
        for p in &self.pieces {
            if p.interval.closure().contains(x) {
                v = v.min(ExtReal::Finite(p.poly.eval(x)));
            }
        }
        v
    }

    pub fn scale(&self, w: f64) -> PiecewiseFn {
        assert!(w >= 0.0 && w.is_finite(), "weights must be finite and non-negative");
        PiecewiseFn {
            pieces: merge_pieces(self.pieces.iter().map(|p| Piece::new(p.interval, p.poly.scale(w))).collect()),
        }
    }

    /// `f(x) - s x`.
    pub fn tilt(&self, s: f64) -> PiecewiseFn {
        PiecewiseFn {
            pieces: self.pieces.iter().map(|p| Piece::new(p.interval, p.poly.tilt(s))).collect(),
        }
    }

    pub fn add_affine(&self, slope: f64, intercept: f64) -> PiecewiseFn {
        let a = Poly::linear(slope, intercept);
        PiecewiseFn {
            pieces: merge_pieces(self.pieces.iter().map(|p| Piece::new(p.interval, p.poly.add(&a))).collect()),
        }
    }

    pub fn restrict(&self, dom: &Interval) -> Result<PiecewiseFn> {
        PiecewiseFn::new(
            self.pieces
                .iter()
                .map(|p| Piece::new(p.interval.intersect(dom), p.poly.clone()))
                .collect(),
        )
    }

    /// Pointwise sum on the intersection of domains.
    pub fn add(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        binary(self, other, |a, b| vec![(None, a.add(b))])
    }

    /// `self - other`; needs `dom self ⊆ dom other` so the result stays proper.
    pub fn sub(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        for p in &self.pieces {
            let covered = other.pieces.iter().fold(Interval::EMPTY, |acc, q| {
                let i = q.interval.intersect(&p.interval);
                if i.is_empty() {
                    acc
                } else {
                    acc.hull(&i)
                }
            });
            if covered != p.interval || !other.restrict(&p.interval).map(|r| r.has_interval_domain()).unwrap_or(false) {
                return Err(Error::InvalidProblem("difference needs dom f ⊆ dom g".into()));
            }
        }
        binary(self, other, |a, b| vec![(None, a.sub(b))])
    }

    /// Pointwise maximum on the intersection of domains.
    pub fn max(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        binary(self, other, |a, b| {
            let d = a.sub(b);
            vec![(Some(d), a.clone()), (None, b.clone())]
        })
    }

    /// Convexity on an interval domain: convex pieces, continuity and
    /// non-decreasing slopes at interior knots, only upward jumps at domain ends.
    pub fn is_convex(&self) -> bool {
        if !self.has_interval_domain() {
            return false;
        }
        for p in &self.pieces {
            if p.poly.degree() >= 2 {
                let curv = p.poly.derivative().derivative().infimum_on(&p.interval.closure());
                if curv.value < ExtReal::Finite(-CONVEXITY_TOL * (1.0 + p.poly.leading().abs())) {
                    return false;
                }
            }
        }
        let dom = self.domain_hull();
        for b in self.breakpoints() {
            let left = self.pieces.iter().find(|p| p.interval.hi() == b && p.interval.lo() < b);
            let right = self.pieces.iter().find(|p| p.interval.lo() == b && p.interval.hi() > b);
            let at = self.eval(b);
            let interior = dom.contains_interior(b);
            if interior {
                let (Some(l), Some(r)) = (left, right) else {
                    return false;
                };
                let (vl, vr) = (l.poly.eval(b), r.poly.eval(b));
                let at = match at {
                    ExtReal::Finite(v) => v,
                    _ => return false,
                };
                if !approx_eq(vl, at, CONVEXITY_TOL) || !approx_eq(vr, at, CONVEXITY_TOL) {
                    return false;
                }
                let (sl, sr) = (l.poly.derivative().eval(b), r.poly.derivative().eval(b));
                if sl > sr + CONVEXITY_TOL * (1.0 + sl.abs()) {
                    return false;
                }
            } else if let ExtReal::Finite(v) = at {
                // domain endpoint: value may sit above the inward limit only
                let inward = left.or(right).map(|p| p.poly.eval(b));
                if let Some(lim) = inward {
                    if v < lim - CONVEXITY_TOL * (1.0 + lim.abs()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Infimum over `S ∩ dom f`; `+inf` if the intersection is empty.
    pub fn infimum_over(&self, s: &Interval) -> Infimum {
        let mut best = Infimum { value: ExtReal::PosInf, argmin: None };
        for p in &self.pieces {
            let r = p.poly.infimum_on(&p.interval.intersect(s));
            if r.value < best.value || (r.value == best.value && !best.attained() && r.argmin.is_some()) {
                best = Infimum { value: r.value, argmin: r.argmin };
            }
        }
        best
    }

    pub fn infimum(&self) -> Infimum {
        self.infimum_over(&Interval::REAL_LINE)
    }

    /// `{x : f(x) <= level}` for a convex function.
    pub fn sublevel(&self, level: f64) -> Interval {
        let mut out = Interval::EMPTY;
        for p in &self.pieces {
            let iv = p.interval;
            let q = p.poly.sub(&Poly::constant(level));
            let mut pts = vec![iv.lo()];
            pts.extend(q.roots_in(iv.lo(), iv.hi()));
            pts.push(iv.hi());
            for (k, w) in pts.windows(2).enumerate() {
                let (a, b) = (w[0], w[1]);
                let mid = midpoint(a, b);
                let first = k == 0;
                let last = k + 2 == pts.len();
                if q.eval(mid) <= 0.0 {
                    let a_closed = if first { iv.lo_closed() } else { true };
                    let b_closed = if last { iv.hi_closed() } else { true };
                    out = out.hull(&Interval::new(a, a_closed, b, b_closed));
                }
            }
            for &x in &pts {
                if iv.contains(x) && q.eval(x) <= 0.0 {
                    out = out.hull(&Interval::point(x));
                }
            }
            if iv.is_singleton() && q.eval(iv.lo()) <= 0.0 {
                out = out.hull(&iv);
            }
        }
        out
    }

    /// Weighted sum `Σ w_i f_i`.
    pub fn combine(terms: &[(f64, &PiecewiseFn)], zero_weight: ZeroWeight) -> Result<PiecewiseFn> {
        let mut acc = PiecewiseFn::zero();
        for &(w, f) in terms {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidProblem(format!("weight {w} is not finite and non-negative")));
            }
            if w == 0.0 && zero_weight == ZeroWeight::Drop {
                continue;
            }
            acc = acc.add(&f.scale(w)).map_err(|_| Error::ImproperResult)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for PiecewiseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            let terms: Vec<String> = p.poly.coeffs().iter().map(|c| crate::extreal::fmt_scalar(*c)).collect();
            write!(f, "{} on {}", terms.join(","), p.interval)?;
        }
        Ok(())
    }
}

/// Difference `plus - minus` with `+inf` off `dom plus`.
#[derive(Clone, Debug, PartialEq)]
pub struct DCFn {
    pub plus: PiecewiseFn,
    pub minus: PiecewiseFn,
}

impl DCFn {
    pub fn new(plus: PiecewiseFn, minus: PiecewiseFn) -> DCFn {
        DCFn { plus, minus }
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        match self.plus.eval(x) {
            ExtReal::PosInf => ExtReal::PosInf,
            v => v.sub_lower(self.minus.eval(x)),
        }
    }

    /// Explicit piecewise form; fails when `dom plus ⊄ dom minus`.
    pub fn to_piecewise(&self) -> Result<PiecewiseFn> {
        self.plus.sub(&self.minus)
    }

    pub fn infimum_over(&self, s: &Interval) -> Result<Infimum> {
        Ok(self.to_piecewise()?.infimum_over(s))
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    }
}

fn touching(a: &Interval, b: &Interval) -> bool {
    a.hi() == b.lo() && (a.hi_closed() != b.lo_closed())
}

fn merge_pieces(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if touching(&last.interval, &p.interval) && last.poly == p.poly {
                last.interval = last.interval.hull(&p.interval);
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// Elementary cells (points and open gaps) induced by the breakpoints of two functions.
fn cells(a: &PiecewiseFn, b: &PiecewiseFn) -> Vec<Interval> {
    let mut pts = a.breakpoints();
    pts.extend(b.breakpoints());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = Vec::with_capacity(2 * pts.len() + 1);
    let mut prev = f64::NEG_INFINITY;
    for &x in &pts {
        out.push(Interval::open(prev, x));
        out.push(Interval::point(x));
        prev = x;
    }
    out.push(Interval::open(prev, f64::INFINITY));
    out
}

/// Applies a cellwise operation. `op` returns candidate polynomials; when a
/// candidate carries a selector `d`, it is used where `d > 0` (split at roots
/// of `d`), and the last candidate elsewhere.
fn binary(a: &PiecewiseFn, b: &PiecewiseFn, op: impl Fn(&Poly, &Poly) -> Vec<(Option<Poly>, Poly)>) -> Result<PiecewiseFn> {
    let mut pieces = Vec::new();
    for cell in cells(a, b) {
        let rep = if cell.is_singleton() { cell.lo() } else { midpoint(cell.lo(), cell.hi()) };
        let (Some(pa), Some(pb)) = (a.piece_at(rep), b.piece_at(rep)) else {
            continue;
        };
        let cands = op(&pa.poly, &pb.poly);
        match &cands[..] {
            [(None, p)] => pieces.push(Piece::new(cell, p.clone())),
            [(Some(sel), first), (None, other)] => {
                let mut cuts = vec![cell.lo()];
                if !cell.is_singleton() && !sel.is_zero() {
                    cuts.extend(sel.roots_in(cell.lo(), cell.hi()));
                }
                cuts.push(cell.hi());
                if cell.is_singleton() {
                    let pick = if sel.eval(rep) > 0.0 { first } else { other };
                    pieces.push(Piece::new(cell, pick.clone()));
                    continue;
                }
                for (k, w) in cuts.windows(2).enumerate() {
                    let m = midpoint(w[0], w[1]);
                    let pick = if sel.eval(m) > 0.0 { first } else { other };
                    pieces.push(Piece::new(Interval::open(w[0], w[1]), pick.clone()));
                    if k + 2 < cuts.len() {
                        pieces.push(Piece::new(Interval::point(w[1]), other.clone()));
                    }
                }
            }
            _ => unreachable!("unsupported cell operation"),
        }
    }
    let pieces = pieces.into_iter().filter(|p| !p.interval.is_empty()).collect::<Vec<_>>();
    if pieces.is_empty() {
        return Err(Error::ImproperResult);
    }
    Ok(PiecewiseFn { pieces: merge_pieces(pieces) })
}
