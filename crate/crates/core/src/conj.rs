//! Fenchel conjugates, strip regions and the product form of c-conjugates.
//!
//! A c-conjugate on `W = R^3` factors as `phi^c(x*, y*, a) = S(x*)` when
//! `(y*, a)` lies in a region `R` of the `(y*, a)` plane and `+inf` otherwise.
//! `S` is a Fenchel conjugate (or an infimal convolution of several) and `R`
//! is a Minkowski sum of strip regions `F(I) = {(y, a) : x y < a for all x in I}`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Interval};
use crate::numeric::{maximize_concave, minimize_convex};
use crate::pwfn::{DCFn, Infimum, PiecewiseFn};

/// Exact pointwise Fenchel conjugate `s -> sup_x { s x - f(x) }`.
#[derive(Clone, Debug)]
pub struct Conjugate {
    src: Arc<PiecewiseFn>,
    dom: Interval,
}

impl Conjugate {
    /// Effective domain (`+inf` outside); empty iff `f` has no affine minorant.
    pub fn domain(&self) -> Interval {
        self.dom
    }

    pub fn source(&self) -> &PiecewiseFn {
        &self.src
    }

    pub fn eval(&self, s: f64) -> ExtReal {
        if !self.dom.contains(s) {
            return ExtReal::PosInf;
        }
        self.src
            .pieces()
            .iter()
            .map(|p| -p.poly.tilt(s).infimum_on(&p.interval).value)
            .fold(ExtReal::NegInf, ExtReal::max)
    }
}

/// Conjugate of a piecewise polynomial; its domain is read off the tail pieces.
pub fn fenchel(f: &PiecewiseFn) -> Conjugate {
    Conjugate { src: Arc::new(f.clone()), dom: conjugate_domain(f) }
}

/// Conjugate of `plus - minus`; needs `dom plus ⊆ dom minus`.
pub fn fenchel_dc(f: &DCFn) -> Result<Conjugate> {
    Ok(fenchel(&f.to_piecewise()?))
}

/// `dom f*`: slopes `s` for which `f - s x` stays bounded below.
pub fn conjugate_domain(f: &PiecewiseFn) -> Interval {
    let pieces = f.pieces();
    let mut dom = Interval::REAL_LINE;
    let last = &pieces[pieces.len() - 1];
    if last.interval.hi() == f64::INFINITY {
        let p = &last.poly;
        dom = dom.intersect(&match p.degree() {
            0 => Interval::at_most(0.0, true),
            1 => Interval::at_most(p.leading(), true),
            _ if p.leading() > 0.0 => Interval::REAL_LINE,
            _ => Interval::EMPTY,
        });
    }
    let first = &pieces[0];
    if first.interval.lo() == f64::NEG_INFINITY {
        let p = &first.poly;
        dom = dom.intersect(&match p.degree() {
            0 => Interval::at_least(0.0, true),
            1 => Interval::at_least(p.leading(), true),
            _ if p.limit_at_infinity(false) == ExtReal::PosInf => Interval::REAL_LINE,
            _ => Interval::EMPTY,
        });
    }
    dom
}

/// Per-ray description of a cone in the `(y, a)` plane: the admissible `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RaySet {
    All,
    /// `a > threshold`, or `a >= threshold` when `inclusive`.
    Above { threshold: f64, inclusive: bool },
    Nothing,
}

impl RaySet {
    pub fn contains(&self, a: f64) -> bool {
        match *self {
            RaySet::All => true,
            RaySet::Nothing => false,
            RaySet::Above { threshold, inclusive } => a > threshold || (inclusive && a == threshold),
        }
    }

    pub fn is_subset_of(&self, other: &RaySet) -> bool {
        match (*self, *other) {
            (RaySet::Nothing, _) | (_, RaySet::All) => true,
            (_, RaySet::Nothing) | (RaySet::All, _) => false,
            (RaySet::Above { threshold: t1, inclusive: i1 }, RaySet::Above { threshold: t2, inclusive: i2 }) => {
                t1 > t2 || (t1 == t2 && (i2 || !i1))
            }
        }
    }
}

/// Minkowski sum `F(I_1) + ... + F(I_k)` of strip regions.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasRegion {
    summands: Vec<Interval>,
}

/// Single-summand region `F(I)`.
pub fn feas_region(i: Interval) -> Result<FeasRegion> {
    if i.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Ok(FeasRegion { summands: vec![i] })
}

impl FeasRegion {
    pub fn summands(&self) -> &[Interval] {
        &self.summands
    }

    pub fn sum(&self, other: &FeasRegion) -> FeasRegion {
        let mut summands = self.summands.clone();
        summands.extend_from_slice(&other.summands);
        FeasRegion { summands }
    }

    fn lmax(&self) -> f64 {
        self.summands.iter().map(|i| i.lo()).fold(f64::NEG_INFINITY, f64::max)
    }

    fn hmin(&self) -> f64 {
        self.summands.iter().map(|i| i.hi()).fold(f64::INFINITY, f64::min)
    }

    /// `inf` over splits `y = Σ y_i` of `Σ sup { x y_i : x in I_i }`.
    pub fn min_support(&self, y: f64) -> ExtReal {
        let (lmax, hmin) = (self.lmax(), self.hmin());
        if lmax > hmin {
            return ExtReal::NegInf;
        }
        let b = if y > 0.0 {
            hmin
        } else if y < 0.0 {
            lmax
        } else {
            return ExtReal::ZERO;
        };
        if b.is_finite() {
            ExtReal::Finite(y * b)
        } else {
            ExtReal::PosInf
        }
    }

    /// Whether `a = min_support(y)` is itself admissible: some minimising
    /// split leaves every summand at a non-attained supremum.
    fn boundary_member(&self, y: f64) -> bool {
        let (lmax, hmin) = (self.lmax(), self.hmin());
        let hi_open_at = |i: &Interval, c: f64| i.hi() == c && !i.hi_closed() && c.is_finite();
        let lo_open_at = |i: &Interval, c: f64| i.lo() == c && !i.lo_closed() && c.is_finite();
        if y > 0.0 {
            self.summands.iter().all(|i| hi_open_at(i, hmin) || lo_open_at(i, hmin))
                && self.summands.iter().any(|i| hi_open_at(i, hmin))
        } else if y < 0.0 {
            self.summands.iter().all(|i| lo_open_at(i, lmax) || hi_open_at(i, lmax))
                && self.summands.iter().any(|i| lo_open_at(i, lmax))
        } else {
            if lmax != hmin || !hmin.is_finite() || self.summands.len() < 2 {
                return false;
            }
            let c = hmin;
            if !self.summands.iter().all(|i| hi_open_at(i, c) || lo_open_at(i, c)) {
                return false;
            }
            // need distinct summands for a positive and a negative share
            self.summands.iter().enumerate().any(|(p, ip)| {
                hi_open_at(ip, c)
                    && self.summands.iter().enumerate().any(|(n, in_)| n != p && lo_open_at(in_, c))
            })
        }
    }

    pub fn ray(&self, y: f64) -> RaySet {
        match self.min_support(y) {
            ExtReal::NegInf => RaySet::All,
            ExtReal::PosInf => RaySet::Nothing,
            ExtReal::Finite(t) => RaySet::Above { threshold: t, inclusive: self.boundary_member(y) },
        }
    }

    pub fn contains(&self, y: f64, a: f64) -> bool {
        self.ray(y).contains(a)
    }

    /// `{x : x y < a for every (y, a) in the region}`.
    pub fn upper_set(&self) -> Interval {
        if self.min_support(0.0) == ExtReal::NegInf || self.contains(0.0, 0.0) {
            return Interval::EMPTY;
        }
        let (hi, hi_closed) = match self.ray(1.0) {
            RaySet::Above { threshold, inclusive } => (threshold, !inclusive),
            _ => (f64::INFINITY, false),
        };
        let (lo, lo_closed) = match self.ray(-1.0) {
            RaySet::Above { threshold, inclusive } => (-threshold, !inclusive),
            _ => (f64::NEG_INFINITY, false),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    /// Region inclusion; both are cones, so the rays `y = -1, 0, 1` decide it.
    pub fn is_subset_of(&self, other: &FeasRegion) -> bool {
        [-1.0, 0.0, 1.0].iter().all(|&y| self.ray(y).is_subset_of(&other.ray(y)))
    }
}

/// Infimal convolution `(a ⊕ b)(x) = inf_u { a(u) + b(x - u) }` of convex
/// functions given with their effective domains.
pub fn inf_convolution_scalar(
    a: &dyn Fn(f64) -> ExtReal,
    dom_a: &Interval,
    b: &dyn Fn(f64) -> ExtReal,
    dom_b: &Interval,
    x: f64,
) -> Infimum {
    let shifted = Interval::point(x).minkowski_sum(&dom_b.negate());
    let u_dom = dom_a.intersect(&shifted);
    minimize_convex(&|u| a(u).add_lower(b(x - u)), &u_dom)
}

/// `inf_convolution_scalar` for convex piecewise functions.
pub fn inf_convolution_pw(a: &PiecewiseFn, b: &PiecewiseFn, x: f64) -> Infimum {
    inf_convolution_scalar(&|u| a.eval(u), &a.domain_hull(), &|u| b.eval(u), &b.domain_hull(), x)
}

/// Product-form c-conjugate: `S(x*)` on `feas`, `+inf` elsewhere, with
/// `S = f_1* ⊕ ... ⊕ f_k*` over the source functions.
#[derive(Clone, Debug)]
pub struct CConjugate {
    parts: Vec<Conjugate>,
    joint: Option<Conjugate>,
    scalar_dom: Interval,
    sources_disjoint: bool,
    feas: FeasRegion,
}

/// `f^c`; an empty scalar domain means `f^c = +inf` (no affine minorant).
pub fn c_conjugate(f: &PiecewiseFn) -> CConjugate {
    let part = fenchel(f);
    CConjugate {
        scalar_dom: part.domain(),
        parts: vec![part],
        joint: None,
        sources_disjoint: false,
        feas: FeasRegion { summands: vec![f.domain_hull()] },
    }
}

pub fn c_conjugate_dc(f: &DCFn) -> Result<CConjugate> {
    Ok(c_conjugate(&f.to_piecewise()?))
}

/// `A ⊕ B` on `W`: scalar parts inf-convolve, regions add.
pub fn c_infconv(a: &CConjugate, b: &CConjugate) -> CConjugate {
    let mut parts = a.parts.clone();
    parts.extend(b.parts.iter().cloned());
    let doms: Vec<Interval> = parts.iter().map(|p| p.source().domain_hull()).collect();
    let closures = doms.iter().fold(Interval::REAL_LINE, |acc, d| acc.intersect(&d.closure()));
    let rel_interiors = doms.iter().fold(Interval::REAL_LINE, |acc, d| {
        acc.intersect(&if d.is_singleton() { *d } else { Interval::open(d.lo(), d.hi()) })
    });
    // exact when every source is convex and relative interiors of domains meet
    let joint = if !rel_interiors.is_empty() && parts.iter().all(|p| p.source().is_convex()) {
        parts[1..]
            .iter()
            .try_fold(parts[0].source().clone(), |acc, p| acc.add(p.source()))
            .ok()
            .map(|sum| fenchel(&sum))
    } else {
        None
    };
    let scalar_dom = match &joint {
        Some(j) => j.domain(),
        None => parts.iter().fold(Interval::point(0.0), |acc, p| acc.minkowski_sum(&p.domain())),
    };
    CConjugate {
        parts,
        joint,
        scalar_dom,
        sources_disjoint: closures.is_empty(),
        feas: a.feas.sum(&b.feas),
    }
}

impl CConjugate {
    pub fn feas(&self) -> &FeasRegion {
        &self.feas
    }

    pub fn parts(&self) -> &[Conjugate] {
        &self.parts
    }

    /// Effective domain of the scalar part.
    pub fn scalar_domain(&self) -> Interval {
        self.scalar_dom
    }

    pub fn scalar(&self, s: f64) -> ExtReal {
        if !self.scalar_dom.contains(s) {
            return ExtReal::PosInf;
        }
        if self.parts.len() == 1 {
            return self.parts[0].eval(s);
        }
        if self.sources_disjoint {
            return ExtReal::NegInf;
        }
        match &self.joint {
            Some(j) => j.eval(s),
            None => infconv_parts(&self.parts, s).value,
        }
    }

    /// Scalar value with attainment of the underlying convolution.
    pub fn scalar_inf(&self, s: f64) -> Infimum {
        if self.parts.len() > 1 && self.joint.is_none() && !self.sources_disjoint && self.scalar_dom.contains(s) {
            return infconv_parts(&self.parts, s);
        }
        Infimum { value: self.scalar(s), argmin: Some(s) }
    }

    pub fn eval(&self, xs: f64, ys: f64, a: f64) -> ExtReal {
        if self.feas.contains(ys, a) {
            self.scalar(xs)
        } else {
            ExtReal::PosInf
        }
    }
}

fn infconv_parts(parts: &[Conjugate], s: f64) -> Infimum {
    if parts.len() == 1 {
        let v = parts[0].eval(s);
        return Infimum { value: v, argmin: Some(s) };
    }
    let rest_dom = parts[1..].iter().fold(Interval::point(0.0), |acc, p| acc.minkowski_sum(&p.domain()));
    inf_convolution_scalar(
        &|u| parts[0].eval(u),
        &parts[0].domain(),
        &|v| infconv_parts(&parts[1..], v).value,
        &rest_dom,
        s,
    )
}

/// `k^{c'}` for a product-form `k`: `Σ f_i**` on `U(feas)`, `+inf` outside.
/// Each biconjugate is a pointwise supremum over slopes.
#[derive(Clone, Debug)]
pub struct CPrimeConjugate {
    parts: Vec<Conjugate>,
    upper: Interval,
}

pub fn c_prime_conjugate(k: &CConjugate) -> CPrimeConjugate {
    CPrimeConjugate { parts: k.parts.clone(), upper: k.feas.upper_set() }
}

impl CPrimeConjugate {
    /// The set `U(feas)` outside of which the value is `+inf`.
    pub fn domain_bound(&self) -> Interval {
        self.upper
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        if !self.upper.contains(x) {
            return ExtReal::PosInf;
        }
        self.parts.iter().fold(ExtReal::ZERO, |acc, p| {
            acc.add_lower(maximize_concave(&|s| ExtReal::Finite(x * s).sub_lower(p.eval(s)), &p.domain()))
        })
    }
}

/// `f^{cc'}` computed pointwise; equals the e-convex hull of `f`.
pub fn biconjugate_ccprime(f: &PiecewiseFn) -> Result<CPrimeConjugate> {
    let k = c_conjugate(f);
    if k.scalar_domain().is_empty() {
        return Err(Error::NoMinorant);
    }
    Ok(c_prime_conjugate(&k))
}

/// The e-affine minorants `x -> x x* - β` on `{x y* < a}` of `f`.
#[derive(Clone, Debug)]
pub struct EAffineSet {
    conj: Conjugate,
    feas: FeasRegion,
}

pub fn eaffine_minorant_set(f: &PiecewiseFn) -> EAffineSet {
    EAffineSet { conj: fenchel(f), feas: FeasRegion { summands: vec![f.domain_hull()] } }
}

impl EAffineSet {
    pub fn contains(&self, xs: f64, beta: f64, ys: f64, a: f64) -> bool {
        self.feas.contains(ys, a) && self.conj.eval(xs) <= ExtReal::Finite(beta)
    }

    pub fn is_empty(&self) -> bool {
        self.conj.domain().is_empty()
    }
}

/// Supremum of sums `a_1 + a_2` of e-affine minorants of `f1` and `f2`.
pub fn sup_etilde(f1: &PiecewiseFn, f2: &PiecewiseFn) -> Result<CPrimeConjugate> {
    let (k1, k2) = (c_conjugate(f1), c_conjugate(f2));
    if k1.scalar_domain().is_empty() || k2.scalar_domain().is_empty() {
        return Err(Error::NoMinorant);
    }
    Ok(c_prime_conjugate(&c_infconv(&k1, &k2)))
}
