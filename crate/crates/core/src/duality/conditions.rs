//! Regularity conditions on the constraint system and the objective.

use serde::Serialize;

use super::{feasible_set, set_b, DCProblem, DualityConfig, LambdaGrid};
use crate::conj::{c_conjugate, sup_etilde};
use crate::episet::{eprime_hull, indicator_epigraph, is_eprime_convex, set_compare, EpiCSet, SetComparison};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::hull::eco_hull;
use crate::numeric::linspace;
use crate::pwfn::PiecewiseFn;

/// Grid comparison of `eco(f1 + f2)` with the supremum of sums of e-affine minorants.
#[derive(Clone, Debug, Serialize)]
pub struct AcReport {
    pub holds: bool,
    pub max_deviation: f64,
    pub witness: Option<f64>,
    pub points: usize,
}

fn sample_points(fs: &[&PiecewiseFn], radius: f64, n: usize) -> Vec<f64> {
    let mut xs = linspace(-radius, radius, n);
    for f in fs {
        for b in f.breakpoints() {
            xs.extend([b - 1e-3, b - 1e-7, b, b + 1e-7, b + 1e-3]);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

pub fn check_ac(f1: &PiecewiseFn, f2: &PiecewiseFn, cfg: &DualityConfig) -> Result<AcReport> {
    let sum = f1.add(f2).map_err(|_| Error::ImproperResult)?;
    let lhs = eco_hull(&sum)?.func;
    let rhs = sup_etilde(f1, f2)?;
    let xs = sample_points(&[f1, f2, &lhs], 4.0 * cfg.w.radius, 8 * cfg.w.n + 1);
    let mut out = AcReport { holds: true, max_deviation: 0.0, witness: None, points: xs.len() };
    for &x in &xs {
        let (a, b) = (lhs.eval(x), rhs.eval(x));
        let ok = match (a, b) {
            (ExtReal::Finite(u), ExtReal::Finite(v)) => {
                let d = (u - v).abs() / (1.0 + u.abs().max(v.abs()));
                out.max_deviation = out.max_deviation.max(d);
                d <= cfg.tol
            }
            _ => a == b,
        };
        if !ok {
            out.holds = false;
            out.witness.get_or_insert(x);
        }
    }
    Ok(out)
}

/// `K = ∪_λ epi (λh)^c` over the grid.
pub fn constraint_epigraphs(p: &DCProblem, grid: &LambdaGrid) -> EpiCSet {
    let blocks = grid
        .points()
        .iter()
        .filter_map(|lam| p.weighted_constraints(lam))
        .map(|lh| c_conjugate(&lh))
        .collect();
    EpiCSet::union(blocks)
}

/// `epi δ_A^c = K` on the W grid.
pub fn check_eccq(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> Result<SetComparison> {
    let a = indicator_epigraph(feasible_set(p))?;
    Ok(set_compare(&a, &constraint_epigraphs(p, grid), &cfg.w))
}

#[derive(Clone, Debug, Serialize)]
pub struct Eccq2Report {
    /// `K` against its e'-convex hull.
    pub eprime_convex: SetComparison,
    /// The e'-convex hull of `K` against `epi δ_B^c`.
    pub hull_matches_b: SetComparison,
}

impl Eccq2Report {
    pub fn holds(&self) -> bool {
        self.eprime_convex.equal()
    }
}

pub fn check_eccq2(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> Result<Eccq2Report> {
    let k = constraint_epigraphs(p, grid);
    let hull = eprime_hull(&k)?;
    let b = indicator_epigraph(set_b(p, grid))?;
    Ok(Eccq2Report { eprime_convex: set_compare(&k, &hull, &cfg.w), hull_matches_b: set_compare(&hull, &b, &cfg.w) })
}

/// e'-convexity of `epi f^c + K`.
pub fn check_ecc(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> Result<SetComparison> {
    let sum = EpiCSet::epigraph_of(&p.f).sum(&constraint_epigraphs(p, grid));
    is_eprime_convex(&sum, &cfg.w)
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaReport {
    /// `(f + δ_B)^c = min_λ f^c ⊕ (λh)^c` with attained minima on the grid.
    pub holds: bool,
    pub ac: bool,
    pub k_eprime_convex: bool,
    pub comparison: SetComparison,
}

impl FormulaReport {
    pub fn hypotheses_met(&self) -> bool {
        self.ac && self.k_eprime_convex
    }
}

pub fn thm31ii_conjugate_formula(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> Result<FormulaReport> {
    let b = set_b(p, grid);
    let fb = p.f.restrict(&b)?;
    let k = constraint_epigraphs(p, grid);
    let rhs = EpiCSet::epigraph_of(&p.f).sum(&k);
    let comparison = set_compare(&EpiCSet::epigraph_of(&fb), &rhs, &cfg.w);
    let ac = check_ac(&p.f, &PiecewiseFn::indicator(b)?, cfg)?.holds;
    let k_eprime_convex = is_eprime_convex(&k, &cfg.w)?.equal();
    Ok(FormulaReport { holds: comparison.equal(), ac, k_eprime_convex, comparison })
}
