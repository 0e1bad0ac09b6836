//! DC programs `inf { f(x) - g(x) : h_t(x) <= 0 }` and their Lagrange-type duals.

mod conditions;
mod report;

pub use conditions::{
    check_ac, check_eccq, check_eccq2, check_ecc, constraint_epigraphs, thm31ii_conjugate_formula, AcReport,
    Eccq2Report, FormulaReport,
};
pub use report::{
    ecccq_sd_check, evaluate, prop_more_results_check, tfl_strong_duality, toland_check, Conditions, DualityReport, GapClass,
    MoreResults, StandardDualReport, TolandReport,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::conj::{c_conjugate, c_infconv, CConjugate};
use crate::episet::WGridConfig;
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Interval};
use crate::hull::eco_hull;
use crate::numeric::minimize_sampled;
use crate::pwfn::{PiecewiseFn, ZeroWeight};

/// Primal data; `g` may be the zero function.
#[derive(Clone, Debug)]
pub struct DCProblem {
    pub f: PiecewiseFn,
    pub g: PiecewiseFn,
    pub constraints: Vec<(String, PiecewiseFn)>,
    pub zero_weight: ZeroWeight,
    warnings: Vec<String>,
}

impl DCProblem {
    /// Validates convexity and properness of every function.
    pub fn new(f: PiecewiseFn, g: PiecewiseFn, constraints: Vec<(String, PiecewiseFn)>) -> Result<DCProblem> {
        let named = [("f", &f), ("g", &g)].into_iter().chain(constraints.iter().map(|(id, h)| (id.as_str(), h)));
        for (id, h) in named {
            if h.pieces().is_empty() {
                return Err(Error::InvalidProblem(format!("{id} has empty domain")));
            }
            if !h.is_convex() {
                return Err(Error::InvalidProblem(format!("{id} is not convex")));
            }
        }
        let mut warnings = Vec::new();
        if f.sub(&g).is_err() {
            warnings.push("dom f is not contained in dom g; the objective takes the value -inf".to_string());
        }
        Ok(DCProblem { f, g, constraints, zero_weight: ZeroWeight::default(), warnings })
    }

    pub fn with_zero_weight(mut self, zero_weight: ZeroWeight) -> DCProblem {
        self.zero_weight = zero_weight;
        self
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `Σ λ_t h_t`; `None` when the weighted sum has empty domain.
    pub fn weighted_constraints(&self, lambda: &[f64]) -> Option<PiecewiseFn> {
        let terms: Vec<(f64, &PiecewiseFn)> = lambda.iter().copied().zip(self.constraints.iter().map(|(_, h)| h)).collect();
        PiecewiseFn::combine(&terms, self.zero_weight).ok()
    }

    /// `f + Σ λ_t h_t`; `None` when its domain is empty.
    pub fn lagrangian_plus(&self, lambda: &[f64]) -> Option<PiecewiseFn> {
        self.weighted_constraints(lambda)?.add(&self.f).ok()
    }
}

/// Finite-support multipliers: active-constraint patterns times a weight grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaGrid {
    pub patterns: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    pub n_constraints: usize,
}

impl LambdaGrid {
    /// `{0} ∪ {2^k / 16 : k = 0..=10}` per active constraint, at most two active.
    pub fn standard(n_constraints: usize) -> LambdaGrid {
        let weights = (0..=10).map(|k| 2f64.powi(k) / 16.0).collect();
        LambdaGrid::with_weights(n_constraints, weights, 2)
    }

    pub fn with_weights(n_constraints: usize, weights: Vec<f64>, max_active: usize) -> LambdaGrid {
        let mut patterns = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_active.min(n_constraints) {
            let mut next = Vec::new();
            for p in &frontier {
                let start = p.last().map_or(0, |&l: &usize| l + 1);
                for t in start..n_constraints {
                    let mut q: Vec<usize> = p.clone();
                    q.push(t);
                    next.push(q);
                }
            }
            patterns.extend(next.iter().cloned());
            frontier = next;
        }
        LambdaGrid { patterns, weights, n_constraints }
    }

    /// All multiplier vectors in pattern order, weights lexicographic.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let m = self.weights.len();
        let mut out = Vec::new();
        for p in &self.patterns {
            for code in 0..m.pow(p.len() as u32) {
                let mut lam = vec![0.0; self.n_constraints];
                let mut c = code;
                for &t in p.iter().rev() {
                    lam[t] = self.weights[c % m];
                    c /= m;
                }
                out.push(lam);
            }
        }
        out
    }

    /// Whether `lam` uses the largest grid weight somewhere.
    fn at_edge(&self, lam: &[f64]) -> bool {
        let top = self.weights.iter().copied().fold(0.0, f64::max);
        lam.iter().any(|&w| w > 0.0 && w == top)
    }
}

/// Grids and tolerances shared by the evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualityConfig {
    /// Half-width of the `x*` window used by sampled inner infima.
    pub window: f64,
    /// Nodes of one-dimensional grids.
    pub nodes: usize,
    /// Tolerance for value comparisons.
    pub tol: f64,
    pub w: WGridConfig,
}

impl Default for DualityConfig {
    fn default() -> DualityConfig {
        DualityConfig { window: 64.0, nodes: 2049, tol: 1e-6, w: WGridConfig::default() }
    }
}

/// A dual optimal value over a λ grid with the per-λ inner values.
#[derive(Clone, Debug, Serialize)]
pub struct DualValue {
    pub value: ExtReal,
    /// First grid point attaining the maximum, when the maximum is not
    /// reached only at the edge of the weight grid.
    pub argmax: Option<Vec<f64>>,
    pub per_lambda: Vec<(Vec<f64>, ExtReal)>,
}

fn sup_over(grid: &LambdaGrid, inner: impl Fn(&[f64]) -> ExtReal + Sync, tol: f64) -> DualValue {
    let per_lambda: Vec<(Vec<f64>, ExtReal)> = grid.points().into_par_iter().map(|lam| {
        let v = inner(&lam);
        (lam, v)
    }).collect();
    let value = per_lambda.iter().map(|(_, v)| *v).fold(ExtReal::NegInf, ExtReal::max);
    let hits = |(_, v): &&(Vec<f64>, ExtReal)| v.approx_eq(value, tol);
    let argmax = per_lambda
        .iter()
        .filter(hits)
        .find(|(lam, _)| !grid.at_edge(lam))
        .map(|(lam, _)| lam.clone());
    DualValue { value, argmax, per_lambda }
}

/// `A = {x : h_t(x) <= 0 for all t}`.
pub fn feasible_set(p: &DCProblem) -> Interval {
    p.constraints.iter().fold(Interval::REAL_LINE, |acc, (_, h)| acc.intersect(&h.sublevel(0.0)))
}

/// `B = ∩_λ {x : (eco λh)(x) <= 0}` over the grid.
pub fn set_b(p: &DCProblem, grid: &LambdaGrid) -> Interval {
    grid.points()
        .par_iter()
        .filter_map(|lam| {
            let lh = p.weighted_constraints(lam)?;
            let e = eco_hull(&lh).ok()?.func;
            Some(e.sublevel(0.0))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Interval::REAL_LINE, |acc, s| acc.intersect(&s))
}

/// `inf { f(x) - g(x) : x in S }` with `finite - (+inf) = -inf`.
pub fn infimum_dc_over(f: &PiecewiseFn, g: &PiecewiseFn, s: &Interval) -> ExtReal {
    let Ok(fs) = f.restrict(s) else {
        return ExtReal::PosInf;
    };
    match fs.sub(g) {
        Ok(d) => d.infimum().value,
        Err(_) => ExtReal::NegInf,
    }
}

pub fn v_primal(p: &DCProblem) -> ExtReal {
    infimum_dc_over(&p.f, &p.g, &feasible_set(p))
}

/// `inf_x { f - g + λh }`; an empty domain of `f + λh` is skipped as `-inf`.
pub fn standard_inner(p: &DCProblem, lambda: &[f64]) -> ExtReal {
    match p.lagrangian_plus(lambda) {
        Some(fl) => infimum_dc_over(&fl, &p.g, &Interval::REAL_LINE),
        None => ExtReal::NegInf,
    }
}

pub fn v_dual_standard(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> DualValue {
    sup_over(grid, |lam| standard_inner(p, lam), cfg.tol)
}

/// `inf { G(w) - Φ(w) : G(w) < +inf }` with `finite - (+inf) = -inf`.
pub fn inner_value(big_g: &CConjugate, phi: &CConjugate, cfg: &DualityConfig) -> ExtReal {
    let gd = big_g.scalar_domain();
    if gd.is_empty() {
        return ExtReal::PosInf;
    }
    if !big_g.feas().is_subset_of(phi.feas()) || !gd.is_subset_of(&phi.scalar_domain()) {
        return ExtReal::NegInf;
    }
    minimize_sampled(&|s| big_g.scalar(s).sub_lower(phi.scalar(s)), &gd, cfg.window, cfg.nodes).value
}

/// Inner value of the dual that pairs `g^c` with `(f + λh)^c`.
pub fn bar_inner(p: &DCProblem, lambda: &[f64], gc: &CConjugate, cfg: &DualityConfig) -> ExtReal {
    match p.lagrangian_plus(lambda) {
        Some(fl) => inner_value(gc, &c_conjugate(&fl), cfg),
        None => ExtReal::NegInf,
    }
}

/// Inner value of the dual that pairs `g^c` with `f^c ⊕ (λh)^c`.
pub fn tilde_inner(p: &DCProblem, lambda: &[f64], gc: &CConjugate, fc: &CConjugate, cfg: &DualityConfig) -> ExtReal {
    match p.weighted_constraints(lambda) {
        Some(lh) => inner_value(gc, &c_infconv(fc, &c_conjugate(&lh)), cfg),
        None => ExtReal::NegInf,
    }
}

pub fn v_dual_bar(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> DualValue {
    let gc = c_conjugate(&p.g);
    sup_over(grid, |lam| bar_inner(p, lam, &gc, cfg), cfg.tol)
}

pub fn v_dual_tilde(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> DualValue {
    let (gc, fc) = (c_conjugate(&p.g), c_conjugate(&p.f));
    sup_over(grid, |lam| tilde_inner(p, lam, &gc, &fc, cfg), cfg.tol)
}
