//! Upward-closed subsets of `W x R` built from c-conjugate epigraphs.
//!
//! Every set is kept as a finite union of product-form blocks; Minkowski sums
//! distribute over unions, and `epi A + epi B` is the epigraph of `A ⊕ B` with
//! the boundary included exactly where the convolution is attained.

use serde::Serialize;

use crate::conj::{c_conjugate, CConjugate};
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Interval};
use crate::hull::convex_lsc_hull;
use crate::numeric::linspace;
use crate::pwfn::PiecewiseFn;

/// A point `(x*, y*, a)` of `W`.
pub type WPoint = [f64; 3];

/// Union of epigraphs of product-form c-conjugates.
#[derive(Clone, Debug)]
pub struct EpiCSet {
    blocks: Vec<CConjugate>,
}

impl EpiCSet {
    pub fn union(blocks: Vec<CConjugate>) -> EpiCSet {
        EpiCSet { blocks }
    }

    pub fn single(block: CConjugate) -> EpiCSet {
        EpiCSet { blocks: vec![block] }
    }

    pub fn epigraph_of(f: &PiecewiseFn) -> EpiCSet {
        EpiCSet::single(c_conjugate(f))
    }

    pub fn blocks(&self) -> &[CConjugate] {
        &self.blocks
    }

    /// Minkowski sum, distributed over the unions.
    pub fn sum(&self, other: &EpiCSet) -> EpiCSet {
        let mut blocks = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for a in &self.blocks {
            for b in &other.blocks {
                blocks.push(crate::conj::c_infconv(a, b));
            }
        }
        EpiCSet { blocks }
    }

    pub fn envelope(&self, w: WPoint) -> ExtReal {
        self.blocks.iter().map(|b| b.eval(w[0], w[1], w[2])).fold(ExtReal::PosInf, ExtReal::min)
    }

    pub fn contains(&self, w: WPoint, beta: f64) -> bool {
        self.blocks.iter().any(|b| {
            if !b.feas().contains(w[1], w[2]) {
                return false;
            }
            let r = b.scalar_inf(w[0]);
            match r.value {
                ExtReal::NegInf => true,
                ExtReal::PosInf => false,
                ExtReal::Finite(v) => beta > v || (beta == v && r.attained()),
            }
        })
    }
}

pub fn membership(s: &EpiCSet, w: WPoint, beta: f64) -> bool {
    s.contains(w, beta)
}

/// `w -> inf { b : (w, b) in S }`.
#[derive(Clone, Debug)]
pub struct EnvelopeFn {
    set: EpiCSet,
}

impl EnvelopeFn {
    pub fn eval(&self, w: WPoint) -> ExtReal {
        self.set.envelope(w)
    }
}

pub fn lower_envelope(s: &EpiCSet) -> EnvelopeFn {
    EnvelopeFn { set: s.clone() }
}

/// The function on `X` whose c-conjugate epigraph is the e'-convex hull of
/// `S`: the maximum over blocks of each block's c'-conjugate.
pub fn eprime_generator(s: &EpiCSet) -> Result<PiecewiseFn> {
    let mut phi: Option<PiecewiseFn> = None;
    for b in s.blocks() {
        if b.scalar_domain().is_empty() {
            continue;
        }
        let mut acc: Option<PiecewiseFn> = None;
        for part in b.parts() {
            let h = convex_lsc_hull(part.source()).map_err(|_| Error::ImproperEnvelope)?.func;
            acc = Some(match acc {
                None => h,
                Some(a) => a.add(&h).map_err(|_| Error::ImproperEnvelope)?,
            });
        }
        let upper = b.feas().upper_set();
        let block_fn = acc
            .ok_or(Error::ImproperEnvelope)?
            .restrict(&upper)
            .map_err(|_| Error::ImproperEnvelope)?;
        phi = Some(match phi {
            None => block_fn,
            Some(p) => p.max(&block_fn).map_err(|_| Error::ImproperEnvelope)?,
        });
    }
    phi.ok_or(Error::ImproperEnvelope)
}

/// e'-convex hull `(env S)^{c'c}`, itself a single product block.
pub fn eprime_hull(s: &EpiCSet) -> Result<EpiCSet> {
    let phi = eprime_generator(s)?;
    let k = c_conjugate(&phi);
    if k.scalar_domain().is_empty() {
        return Err(Error::ImproperEnvelope);
    }
    Ok(EpiCSet::single(k))
}

/// Sampling grid on `W`: a symmetric axis plus the boundary values of every
/// block involved, so strict and non-strict boundaries are both probed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WGridConfig {
    pub n: usize,
    pub radius: f64,
    pub tol: f64,
}

impl Default for WGridConfig {
    fn default() -> Self {
        WGridConfig { n: 64, radius: 4.0, tol: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct WGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `a` values per entry of `ys`.
    pub alphas: Vec<Vec<f64>>,
}

impl WGrid {
    pub fn for_sets(cfg: &WGridConfig, sets: &[&EpiCSet]) -> WGrid {
        let mut axis = linspace(-cfg.radius, cfg.radius, cfg.n.max(2));
        axis.extend([0.0, -1.0, 1.0]);
        let mut xs = axis.clone();
        for s in sets {
            for b in s.blocks() {
                let d = b.scalar_domain();
                for e in [d.lo(), d.hi()] {
                    if e.is_finite() {
                        xs.extend([e, e - 1e-3, e + 1e-3]);
                    }
                }
            }
        }
        let ys = sorted_unique(axis.clone());
        let alphas = ys
            .iter()
            .map(|&y| {
                let mut a = axis.clone();
                for s in sets {
                    for b in s.blocks() {
                        if let ExtReal::Finite(t) = b.feas().min_support(y) {
                            a.extend([t, t + 1e-3]);
                        }
                    }
                }
                sorted_unique(a)
            })
            .collect();
        WGrid { xs: sorted_unique(xs), ys, alphas }
    }

    pub fn points(&self) -> impl Iterator<Item = WPoint> + '_ {
        self.ys.iter().enumerate().flat_map(move |(yi, &y)| {
            self.alphas[yi].iter().flat_map(move |&a| self.xs.iter().map(move |&x| [x, y, a]))
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.alphas.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// A point of `W x R` in exactly one of two compared sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub w: WPoint,
    pub beta: f64,
    pub in_first: bool,
    pub in_second: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetComparison {
    /// `S1 ⊆ S2` on the grid.
    pub first_in_second: bool,
    /// `S2 ⊆ S1` on the grid.
    pub second_in_first: bool,
    pub witness: Option<Witness>,
    pub points: usize,
}

impl SetComparison {
    pub fn equal(&self) -> bool {
        self.first_in_second && self.second_in_first
    }
}

/// Envelope values of every block on the grid, cached per `x*` and per `(y*, a)`.
struct BlockTable {
    scalar: Vec<(ExtReal, bool)>,
    feas: Vec<Vec<bool>>,
}

fn tabulate(s: &EpiCSet, g: &WGrid) -> Vec<BlockTable> {
    s.blocks()
        .iter()
        .map(|b| BlockTable {
            scalar: g
                .xs
                .iter()
                .map(|&x| {
                    let r = b.scalar_inf(x);
                    (r.value, r.attained())
                })
                .collect(),
            feas: g
                .ys
                .iter()
                .zip(&g.alphas)
                .map(|(&y, al)| al.iter().map(|&a| b.feas().contains(y, a)).collect())
                .collect(),
        })
        .collect()
}

/// `(value, attained)` of the envelope at grid indices.
fn table_env(t: &[BlockTable], xi: usize, yi: usize, ai: usize) -> (ExtReal, bool) {
    let mut best = (ExtReal::PosInf, false);
    for b in t {
        if !b.feas[yi][ai] {
            continue;
        }
        let (v, att) = b.scalar[xi];
        if v < best.0 || (v == best.0 && att) {
            best = (v, att);
        }
    }
    best
}

/// Grid comparison of two sets: envelopes within `tol`, and boundary
/// attainment where the envelopes agree.
pub fn set_compare(s1: &EpiCSet, s2: &EpiCSet, cfg: &WGridConfig) -> SetComparison {
    let g = WGrid::for_sets(cfg, &[s1, s2]);
    let (t1, t2) = (tabulate(s1, &g), tabulate(s2, &g));
    let mut out = SetComparison { first_in_second: true, second_in_first: true, witness: None, points: g.len() };
    for (yi, &y) in g.ys.iter().enumerate() {
        for (ai, &a) in g.alphas[yi].iter().enumerate() {
            for (xi, &x) in g.xs.iter().enumerate() {
                let (v1, at1) = table_env(&t1, xi, yi, ai);
                let (v2, at2) = table_env(&t2, xi, yi, ai);
                let (lacks_1, lacks_2, beta) = compare_point(v1, at1, v2, at2, cfg.tol);
                if lacks_2 {
                    out.first_in_second = false;
                }
                if lacks_1 {
                    out.second_in_first = false;
                }
                if (lacks_1 || lacks_2) && out.witness.is_none() {
                    out.witness = Some(Witness { w: [x, y, a], beta, in_first: lacks_2, in_second: lacks_1 });
                }
            }
        }
    }
    out
}

/// Returns `(S1 misses a point of S2, S2 misses a point of S1, witness beta)`.
fn compare_point(v1: ExtReal, at1: bool, v2: ExtReal, at2: bool, tol: f64) -> (bool, bool, f64) {
    match (v1, v2) {
        (ExtReal::PosInf, ExtReal::PosInf) | (ExtReal::NegInf, ExtReal::NegInf) => (false, false, 0.0),
        (ExtReal::Finite(a), ExtReal::Finite(b)) => {
            if crate::extreal::approx_eq(a, b, tol) {
                (at2 && !at1, at1 && !at2, a.min(b))
            } else if a < b {
                (false, true, a)
            } else {
                (true, false, b)
            }
        }
        (a, b) => {
            let beta = a.min(b).finite().unwrap_or_else(|| a.max(b).finite().map_or(0.0, |v| v - 1.0));
            (a > b, a < b, beta)
        }
    }
}

pub fn set_equal(s1: &EpiCSet, s2: &EpiCSet, cfg: &WGridConfig) -> SetComparison {
    set_compare(s1, s2, cfg)
}

/// Whether `S` coincides with its e'-convex hull on the grid.
pub fn is_eprime_convex(s: &EpiCSet, cfg: &WGridConfig) -> Result<SetComparison> {
    Ok(set_compare(s, &eprime_hull(s)?, cfg))
}

/// `epi δ_D^c` for an interval `D`.
pub fn indicator_epigraph(d: Interval) -> Result<EpiCSet> {
    Ok(EpiCSet::epigraph_of(&PiecewiseFn::indicator(d)?))
}
