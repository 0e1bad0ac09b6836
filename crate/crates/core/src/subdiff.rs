//! ε-subdifferentials and ε-c-subdifferentials, and the identities tying
//! them to c-conjugate epigraphs.
//!
//! `(x*, y*, a)` is an ε-c-subgradient of `f` at `x̄` iff `x̄ y* < a`,
//! `dom f ⊆ {x y* < a}` and `x*` is a classical ε-subgradient.

use serde::Serialize;

use crate::conj::{c_conjugate, fenchel, Conjugate, FeasRegion};
use crate::episet::{EpiCSet, WGrid, WGridConfig, WPoint};
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Interval};
use crate::hull::eco_hull;
use crate::numeric::{golden_min, minimize_convex, SEARCH_CAP};
use crate::pwfn::{PiecewiseFn, ZeroWeight};

/// `x*` with `f*(x*) + f(x̄) - x̄ x* <= ε`, i.e. the classical ε-subdifferential.
pub fn eps_subdiff(f: &PiecewiseFn, xbar: f64, eps: f64) -> Interval {
    let ExtReal::Finite(fx) = f.eval(xbar) else {
        return Interval::EMPTY;
    };
    eps_subdiff_from(&fenchel(f), fx, xbar, eps)
}

/// Slack `f*(x*) + f(x̄) - x̄ x*`, non-negative by Fenchel-Young.
fn young_gap(conj: &Conjugate, fx: f64, xbar: f64, s: f64) -> ExtReal {
    conj.eval(s).add_lower(ExtReal::Finite(fx - xbar * s))
}

fn eps_subdiff_from(conj: &Conjugate, fx: f64, xbar: f64, eps: f64) -> Interval {
    let dom = conj.domain();
    let gap = |s: f64| young_gap(conj, fx, xbar, s);
    let best = minimize_convex(&gap, &dom);
    let Some(s0) = best.argmin.or_else(|| finite_point_near_inf(&dom)) else {
        return Interval::EMPTY;
    };
    let slack = |s: f64| gap(s) <= ExtReal::Finite(eps);
    if !slack(s0) {
        return Interval::EMPTY;
    }
    let hi = boundary(&slack, s0, dom.hi(), dom.hi_closed());
    let lo = boundary(&slack, s0, dom.lo(), dom.lo_closed());
    Interval::new(lo.0, lo.1, hi.0, hi.1)
}

fn finite_point_near_inf(dom: &Interval) -> Option<f64> {
    if dom.is_empty() {
        None
    } else if dom.contains(0.0) {
        Some(0.0)
    } else if dom.lo().is_finite() {
        Some(dom.lo())
    } else {
        Some(dom.hi())
    }
}

/// Last point from `s0` toward `end` where `inside` holds; returns `(point, closed)`.
fn boundary(inside: &dyn Fn(f64) -> bool, s0: f64, end: f64, end_closed: bool) -> (f64, bool) {
    let dir = if end >= s0 { 1.0 } else { -1.0 };
    let far = if end.is_finite() {
        if end_closed && inside(end) {
            return (end, true);
        }
        end
    } else {
        // s0 may sit far out on a flat stretch of the gap
        let cap = SEARCH_CAP.max(4.0 * s0.abs());
        let mut step = 1.0;
        loop {
            let x = s0 + dir * step;
            if !inside(x) {
                break x;
            }
            if step >= cap {
                return (end, false);
            }
            step *= 2.0;
        }
    };
    let (mut a, mut b) = (s0, far);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if inside(m) {
            a = m;
        } else {
            b = m;
        }
    }
    (a, true)
}

/// `∂_{c,ε} f(x̄)` as a product of an `x*` interval and a strip region.
#[derive(Clone, Debug)]
pub struct CSubdiff {
    pub xstar: Interval,
    pub feas: Option<FeasRegion>,
    xbar: f64,
}

impl CSubdiff {
    pub fn is_empty(&self) -> bool {
        self.xstar.is_empty() || self.feas.is_none()
    }

    pub fn contains(&self, w: WPoint) -> bool {
        let Some(feas) = &self.feas else {
            return false;
        };
        self.xstar.contains(w[0]) && feas.contains(w[1], w[2]) && self.xbar * w[1] < w[2]
    }
}

pub fn c_subdiff(f: &PiecewiseFn, xbar: f64, eps: f64) -> CSubdiff {
    let xstar = eps_subdiff(f, xbar, eps);
    let feas = if xstar.is_empty() { None } else { crate::conj::feas_region(f.domain_hull()).ok() };
    CSubdiff { xstar, feas, xbar }
}

/// Rebuild of `epi f^c` from ε-c-subdifferentials of `f` at the single point `x0`.
#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionReport {
    pub x0: f64,
    pub points: usize,
    pub max_residual: f64,
    pub mismatches: usize,
    pub equal: bool,
}

/// ε values `{0} ∪ {2^k · base : k = 0..=40}`.
pub fn eps_grid(base: f64) -> Vec<f64> {
    std::iter::once(0.0).chain((0..=40).map(|k| base * 2f64.powi(k))).collect()
}

/// Smallest ε on the grid (then bisected between grid neighbours) with
/// `w ∈ ∂_{c,ε} f(x0)`, or `None` when no grid value admits `w`.
fn minimal_eps(member: &dyn Fn(f64) -> bool, grid: &[f64]) -> Option<f64> {
    let k = grid.iter().position(|&e| member(e))?;
    if k == 0 {
        return Some(0.0);
    }
    let (mut lo, mut hi) = (grid[k - 1], grid[k]);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if m == lo || m == hi {
            break;
        }
        if member(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Some(hi)
}

pub fn lemma9_reconstruct(f: &PiecewiseFn, x0: f64, cfg: &WGridConfig) -> Result<ReconstructionReport> {
    let ExtReal::Finite(fx) = f.eval(x0) else {
        return Err(Error::OutOfDomain(x0));
    };
    let conj = fenchel(f);
    let set = EpiCSet::single(c_conjugate(f));
    let grid = WGrid::for_sets(cfg, &[&set]);
    let feas = crate::conj::feas_region(f.domain_hull())?;
    let eps = eps_grid(cfg.tol);
    // envelope of the union over ε, per x*: x0 x* + ε_min - f(x0)
    let recon_scalar: Vec<ExtReal> = grid
        .xs
        .iter()
        .map(|&s| {
            let member = |e: f64| young_gap(&conj, fx, x0, s) <= ExtReal::Finite(e);
            match minimal_eps(&member, &eps) {
                Some(e) => ExtReal::Finite(x0 * s + e - fx),
                None => ExtReal::PosInf,
            }
        })
        .collect();
    let mut report = ReconstructionReport { x0, points: 0, max_residual: 0.0, mismatches: 0, equal: true };
    for (yi, &y) in grid.ys.iter().enumerate() {
        for &a in &grid.alphas[yi] {
            let admitted = feas.contains(y, a) && x0 * y < a;
            for (xi, &s) in grid.xs.iter().enumerate() {
                report.points += 1;
                let recon = if admitted { recon_scalar[xi] } else { ExtReal::PosInf };
                let truth = set.envelope([s, y, a]);
                match (recon, truth) {
                    (ExtReal::Finite(r), ExtReal::Finite(t)) => {
                        let res = (r - t).abs() / (1.0 + t.abs());
                        report.max_residual = report.max_residual.max(res);
                        if res > cfg.tol {
                            report.mismatches += 1;
                        }
                    }
                    (r, t) if r == t => {}
                    _ => report.mismatches += 1,
                }
            }
        }
    }
    report.equal = report.mismatches == 0;
    Ok(report)
}

/// Outcome of comparing `∂_{c,ε}(f + δ_B)(x̄)` with the union over λ and
/// ε-splits of `∂_{c,ε1} f(x̄) + ∂_{c,ε2}(eco λh)(x̄)`.
#[derive(Clone, Debug, Serialize)]
pub struct SubdiffIdentityReport {
    pub xbar: f64,
    pub eps: f64,
    pub equal: bool,
    /// Points in exactly one side; `true` marks the left-hand side.
    pub counterexamples: Vec<(WPoint, bool)>,
    pub lambda_grid_relative: bool,
}

/// `(lower, upper)` envelope over `e1 in [0, total]` of `I1(e1) + I2(total - e1)`.
fn union_over_splits(i1: &dyn Fn(f64) -> Interval, i2: &dyn Fn(f64) -> Interval, total: f64) -> Interval {
    let sum = |e1: f64| i1(e1).minkowski_sum(&i2(total - e1));
    if total == 0.0 {
        return sum(0.0);
    }
    let hi_neg = |e1: f64| {
        let s = sum(e1);
        if s.is_empty() {
            f64::INFINITY
        } else {
            -s.hi()
        }
    };
    let lo_val = |e1: f64| {
        let s = sum(e1);
        if s.is_empty() {
            f64::INFINITY
        } else {
            s.lo()
        }
    };
    let mut out = Interval::EMPTY;
    for e1 in [0.0, total, golden_min(&hi_neg, 0.0, total).0, golden_min(&lo_val, 0.0, total).0] {
        out = out.hull(&sum(e1));
    }
    out
}

pub fn thm31iii_check(
    f: &PiecewiseFn,
    constraints: &[PiecewiseFn],
    b: &Interval,
    xbar: f64,
    eps: f64,
    lambdas: &[Vec<f64>],
    zero_weight: ZeroWeight,
    cfg: &WGridConfig,
) -> Result<SubdiffIdentityReport> {
    if !b.contains(xbar) || !f.in_domain(xbar) {
        return Err(Error::OutOfDomain(xbar));
    }
    let fb = f.restrict(b)?;
    let lhs = c_subdiff(&fb, xbar, eps);
    let fconj = fenchel(f);
    let fx = f.eval(xbar).to_f64();
    let f_feas = crate::conj::feas_region(f.domain_hull())?;

    struct Side {
        xstar: Interval,
        feas: FeasRegion,
    }
    let mut rhs: Vec<Side> = Vec::new();
    for lam in lambdas {
        let terms: Vec<(f64, &PiecewiseFn)> = lam.iter().copied().zip(constraints.iter()).collect();
        let lh = PiecewiseFn::combine(&terms, zero_weight)?;
        let eco = eco_hull(&lh)?.func;
        let ExtReal::Finite(ev) = eco.eval(xbar) else {
            continue;
        };
        let total = eps + ev;
        if total < 0.0 {
            continue;
        }
        let econj = fenchel(&eco);
        let i1 = |e: f64| eps_subdiff_from(&fconj, fx, xbar, e);
        let i2 = |e: f64| eps_subdiff_from(&econj, ev, xbar, e);
        let xstar = union_over_splits(&i1, &i2, total);
        if xstar.is_empty() {
            continue;
        }
        rhs.push(Side { xstar, feas: f_feas.sum(&crate::conj::feas_region(eco.domain_hull())?) });
    }

    let set = EpiCSet::epigraph_of(&fb);
    let grid = WGrid::for_sets(cfg, &[&set]);
    let mut xs = grid.xs.clone();
    for iv in std::iter::once(lhs.xstar).chain(rhs.iter().map(|s| s.xstar)) {
        for e in [iv.lo(), iv.hi()] {
            if e.is_finite() {
                xs.extend([e - 1e-3, e + 1e-3, e]);
            }
        }
    }
    let near_edge = |x: f64, iv: &Interval| {
        [iv.lo(), iv.hi()].iter().any(|e| e.is_finite() && (x - e).abs() <= 1e-7 * (1.0 + e.abs()))
    };
    let mut report = SubdiffIdentityReport { xbar, eps, equal: true, counterexamples: Vec::new(), lambda_grid_relative: true };
    for (yi, &y) in grid.ys.iter().enumerate() {
        for &a in &grid.alphas[yi] {
            for &x in &xs {
                let w = [x, y, a];
                let in_lhs = lhs.contains(w);
                let in_rhs = xbar * y < a && rhs.iter().any(|s| s.xstar.contains(x) && s.feas.contains(y, a));
                if in_lhs != in_rhs {
                    let ambiguous = near_edge(x, &lhs.xstar) || rhs.iter().any(|s| near_edge(x, &s.xstar));
                    if !ambiguous {
                        report.equal = false;
                        if report.counterexamples.len() < 8 {
                            report.counterexamples.push((w, in_lhs));
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::pwfn::tests::{cubic_minus_square, jump_at_zero};

    fn ramp() -> PiecewiseFn {
        PiecewiseFn::single(Interval::at_least(0.0, true), Poly::linear(1.0, 0.0)).unwrap()
    }

    fn near(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + b.abs())
    }

    #[test]
    fn eps_subdiff_examples() {
        let s = eps_subdiff(&ramp(), 1.0, 0.0);
        assert!(near(s.lo(), 1.0) && near(s.hi(), 1.0), "{s}");
        let s = eps_subdiff(&PiecewiseFn::affine(2.5, 1.0), -3.0, 0.0);
        assert!(near(s.lo(), 2.5) && near(s.hi(), 2.5), "{s}");
        let s0 = eps_subdiff(&ramp(), 0.0, 0.0);
        assert_eq!(s0.lo(), f64::NEG_INFINITY);
        assert!(near(s0.hi(), 1.0));
        let q = PiecewiseFn::single(Interval::REAL_LINE, Poly::new(vec![0.0, 0.0, 1.0])).unwrap();
        let s = eps_subdiff(&q, 1.0, 0.25);
        // x*^2/4 + 1 - x* <= 1/4  <=>  x* in [1, 3]
        assert!(near(s.lo(), 1.0) && near(s.hi(), 3.0), "{s}");
        assert!(eps_subdiff(&jump_at_zero(), 0.0, 0.5).is_empty());
        assert!(!eps_subdiff(&jump_at_zero(), 0.0, 1.0).is_empty());
    }

    #[test]
    fn eps_subdiff_with_flat_gap_at_a_boundary_point() {
        // x^4 on [1, inf[ at 1: the gap vanishes on all of ]-inf, 4]
        let f = PiecewiseFn::single(Interval::at_least(1.0, true), Poly::new(vec![0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        let s = eps_subdiff(&f, 1.0, 0.0);
        assert!(s.lo() == f64::NEG_INFINITY && (s.hi() - 4.0).abs() < 1e-6, "{s}");
    }

    #[test]
    fn eps_subdiff_matches_inequality_sweep() {
        let f = cubic_minus_square();
        for (xbar, eps) in [(1.0, 0.0), (1.0, 0.3), (0.2, 0.1), (2.0, 1.0)] {
            let s = eps_subdiff(&f, xbar, eps);
            let fx = f.eval(xbar).to_f64();
            let xs: Vec<f64> = (0..=4000).map(|k| k as f64 / 400.0).collect();
            for k in -40..=80 {
                let xs_ = k as f64 * 0.125;
                let ok = xs.iter().all(|&x| f.eval(x).to_f64() - fx >= xs_ * (x - xbar) - eps - 1e-9);
                if !near(xs_, s.lo()) && !near(xs_, s.hi()) && (xs_ - s.lo()).abs() > 1e-3 && (xs_ - s.hi()).abs() > 1e-3 {
                    assert_eq!(s.contains(xs_), ok, "x̄={xbar} ε={eps} x*={xs_} in {s}");
                }
            }
        }
    }

    #[test]
    fn c_subdiff_matches_raw_definition() {
        // f(x) - f(x̄) >= c(x, w) - c(x̄, w) - ε for all x, and x̄ y* < a
        let f = ramp();
        let d = c_subdiff(&f, 0.0, 0.0);
        let xs: Vec<f64> = (-200..=2000).map(|k| k as f64 / 100.0).chain([1e6]).collect();
        for &w in &[[0.5, -1.0, 0.3], [1.0, 0.0, 0.1], [1.2, -1.0, 0.3], [0.5, 0.2, 0.3], [0.5, -1.0, 0.0], [-3.0, -0.5, 2.0]] {
            let raw = 0.0 * w[1] < w[2]
                && xs.iter().all(|&x| {
                    let c = if x * w[1] < w[2] { ExtReal::Finite(x * w[0]) } else { ExtReal::PosInf };
                    let lhs = f.eval(x).sub_lower(f.eval(0.0));
                    lhs >= c.sub_lower(ExtReal::Finite(0.0))
                });
            assert_eq!(d.contains(w), raw, "{w:?}");
        }
        assert!(c_subdiff(&f, -1.0, 0.0).is_empty());
    }

    #[test]
    fn hull_subdiff_inclusion() {
        for f in [cubic_minus_square(), jump_at_zero()] {
            let e = eco_hull(&f).unwrap().func;
            for xbar in [0.0, 0.3, 1.0] {
                for eps in [0.0, 0.1, 1.5] {
                    let a = eps_subdiff(&f, xbar, eps);
                    let b = eps_subdiff(&e, xbar, eps);
                    if !a.is_empty() {
                        assert!(b.lo() <= a.lo() + 1e-9 && a.hi() <= b.hi() + 1e-9, "{a} ⊄ {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn lemma9_examples() {
        let cfg = WGridConfig { n: 16, ..Default::default() };
        let r = lemma9_reconstruct(&ramp(), 0.0, &cfg).unwrap();
        assert!(r.equal, "{r:?}");
        let r = lemma9_reconstruct(&PiecewiseFn::affine(1.0, 2.0), 0.5, &cfg).unwrap();
        assert!(r.equal && r.max_residual < 1e-9, "{r:?}");
        let r = lemma9_reconstruct(&cubic_minus_square(), 1.0, &cfg).unwrap();
        assert!(r.equal, "{r:?}");
        assert!(matches!(lemma9_reconstruct(&ramp(), -1.0, &cfg), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn eps_monotonicity() {
        let f = cubic_minus_square();
        let mut prev = Interval::EMPTY;
        for eps in [0.0, 0.01, 0.1, 1.0, 10.0] {
            let s = eps_subdiff(&f, 1.0, eps);
            assert!(prev.is_subset_of(&s) || (prev.lo() - s.lo()).abs() < 1e-9);
            prev = s;
        }
    }

    #[test]
    fn sum_rule_on_cubic_data() {
        use crate::duality::tests::cubic_problem;
        use crate::duality::LambdaGrid;
        let p = cubic_problem();
        let hs: Vec<PiecewiseFn> = p.constraints.iter().map(|(_, h)| h.clone()).collect();
        let lams = LambdaGrid::with_weights(3, vec![0.25, 1.0, 4.0], 2).points();
        let cfg = WGridConfig { n: 16, ..Default::default() };
        let b = Interval::at_least(0.0, true);
        for (xbar, eps) in [(1.0, 0.0), (0.5, 0.1), (2.0, 1.0)] {
            let r = thm31iii_check(&p.f, &hs, &b, xbar, eps, &lams, ZeroWeight::KeepDomain, &cfg).unwrap();
            assert!(r.equal, "x̄={xbar} ε={eps}: {:?}", r.counterexamples);
        }
    }

    #[test]
    fn sum_rule_diagnostic_on_weak_gap() {
        use crate::duality::tests::weak_gap_problem;
        let p = weak_gap_problem();
        let hs = vec![p.constraints[0].1.clone()];
        let lams: Vec<Vec<f64>> = [0.0, 0.25, 1.0, 4.0].iter().map(|&l| vec![l]).collect();
        let cfg = WGridConfig { n: 16, ..Default::default() };
        let b = Interval::at_least(0.0, true);
        let r = thm31iii_check(&p.f, &hs, &b, 0.0, 0.0, &lams, ZeroWeight::KeepDomain, &cfg).unwrap();
        // the right-hand side is always contained in the left-hand side
        assert!(r.counterexamples.iter().all(|(_, in_lhs)| *in_lhs), "{r:?}");
        assert!(thm31iii_check(&p.f, &hs, &b, -1.0, 0.0, &lams, ZeroWeight::KeepDomain, &cfg).is_err());
    }
}
