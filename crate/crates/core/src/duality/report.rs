//! End-to-end duality reports and the auxiliary identities around them.

use serde::Serialize;

use super::conditions::{check_ac, check_ecc, check_eccq, check_eccq2, thm31ii_conjugate_formula};
use super::{
    feasible_set, infimum_dc_over, inner_value, set_b, v_dual_bar, v_dual_standard, v_dual_tilde, v_primal, DCProblem,
    DualValue, DualityConfig, LambdaGrid,
};
use crate::conj::{c_conjugate, c_infconv, fenchel, feas_region, sup_etilde};
use crate::episet::{eprime_generator, indicator_epigraph, is_eprime_convex, EpiCSet, Witness};
use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Interval};
use crate::hull::is_econvex;
use crate::numeric::{linspace, minimize_sampled};
use crate::pwfn::PiecewiseFn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapClass {
    WeakDualityHolds,
    ZeroGap,
    StrongDuality,
    WeakDualityFails,
}

impl GapClass {
    pub fn classify(primal: ExtReal, dual: &DualValue, tol: f64) -> GapClass {
        if dual.value.approx_eq(primal, tol) {
            if dual.argmax.is_some() {
                GapClass::StrongDuality
            } else {
                GapClass::ZeroGap
            }
        } else if dual.value > primal {
            GapClass::WeakDualityFails
        } else {
            GapClass::WeakDualityHolds
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GapClass::WeakDualityHolds => "weak-duality-holds",
            GapClass::ZeroGap => "zero-gap",
            GapClass::StrongDuality => "strong-duality",
            GapClass::WeakDualityFails => "weak-duality-fails",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Conditions {
    /// `(AC)` for `f` and `δ_B`.
    pub ac: bool,
    pub eccq: bool,
    pub eccq_witness: Option<Witness>,
    /// e'-convexity of `K`.
    pub eccq2: bool,
    pub ecc: bool,
    pub g_econvex: bool,
    pub vp_equals_inf_b: bool,
    pub conjugate_formula: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub set_a: Interval,
    pub set_b: Interval,
    pub v_primal: ExtReal,
    pub v_primal_over_b: ExtReal,
    pub v_dual_standard: DualValue,
    pub v_dual_bar: DualValue,
    pub v_dual_tilde: DualValue,
    pub conditions: Conditions,
    pub gap_standard: GapClass,
    pub gap_tilde: GapClass,
    /// Every hypothesis of Toland-Fenchel-Lagrange strong duality verified.
    pub tfl_hypotheses: bool,
    /// `v_dual_bar = v_dual_standard` is only guaranteed for e-convex `g`.
    pub bar_relation_guaranteed: bool,
    pub warnings: Vec<String>,
}

impl DualityReport {
    /// Strong duality always comes with an attaining multiplier.
    pub fn is_consistent(&self) -> bool {
        [(self.gap_standard, &self.v_dual_standard), (self.gap_tilde, &self.v_dual_tilde)]
            .iter()
            .all(|(c, d)| *c != GapClass::StrongDuality || d.argmax.is_some())
    }
}

/// Only the optimal values and gap classes, without any set-level checks.
pub fn evaluate(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> (ExtReal, DualValue, DualValue, DualValue) {
    (v_primal(p), v_dual_standard(p, grid, cfg), v_dual_bar(p, grid, cfg), v_dual_tilde(p, grid, cfg))
}

pub fn tfl_strong_duality(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> Result<DualityReport> {
    let (set_a, b) = (feasible_set(p), set_b(p, grid));
    let (vp, ds, db, dt) = evaluate(p, grid, cfg);
    let vp_b = infimum_dc_over(&p.f, &p.g, &b);
    let eccq = check_eccq(p, grid, cfg)?;
    let eccq2 = check_eccq2(p, grid, cfg)?;
    let ecc = check_ecc(p, grid, cfg)?.equal();
    let formula = thm31ii_conjugate_formula(p, grid, cfg)?;
    let g_econvex = is_econvex(&p.g);
    let conditions = Conditions {
        ac: formula.ac,
        eccq: eccq.equal(),
        eccq_witness: eccq.witness,
        eccq2: eccq2.holds(),
        ecc,
        g_econvex,
        vp_equals_inf_b: vp.approx_eq(vp_b, cfg.tol),
        conjugate_formula: formula.holds,
    };
    let tfl_hypotheses =
        conditions.ac && conditions.g_econvex && conditions.eccq2 && conditions.ecc && conditions.vp_equals_inf_b;
    Ok(DualityReport {
        set_a,
        set_b: b,
        v_primal: vp,
        v_primal_over_b: vp_b,
        gap_standard: GapClass::classify(vp, &ds, cfg.tol),
        gap_tilde: GapClass::classify(vp, &dt, cfg.tol),
        v_dual_standard: ds,
        v_dual_bar: db,
        v_dual_tilde: dt,
        conditions,
        tfl_hypotheses,
        bar_relation_guaranteed: g_econvex,
        warnings: p.warnings().to_vec(),
    })
}

/// Hypotheses under which the standard dual has zero gap and attainment.
#[derive(Clone, Debug, Serialize)]
pub struct StandardDualReport {
    pub eccq2: bool,
    pub minorants_exist: bool,
    pub ac_fg_b: bool,
    pub sum_eprime_convex: bool,
    pub vp_equals_inf_b: bool,
    pub gap: GapClass,
}

impl StandardDualReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.eccq2 && self.minorants_exist && self.ac_fg_b && self.sum_eprime_convex && self.vp_equals_inf_b
    }
}

pub fn ecccq_sd_check(p: &DCProblem, grid: &LambdaGrid, cfg: &DualityConfig) -> Result<StandardDualReport> {
    let d = p.f.sub(&p.g)?;
    let b = set_b(p, grid);
    let delta_b = PiecewiseFn::indicator(b)?;
    let minorants_exist = !c_conjugate(&d).scalar_domain().is_empty();
    let ac_fg_b = minorants_exist && check_ac(&d, &delta_b, cfg)?.holds;
    let sum = EpiCSet::epigraph_of(&d).sum(&indicator_epigraph(b)?);
    let sum_eprime_convex = is_eprime_convex(&sum, &cfg.w).map(|c| c.equal()).unwrap_or(false);
    let vp = v_primal(p);
    let ds = v_dual_standard(p, grid, cfg);
    Ok(StandardDualReport {
        eccq2: check_eccq2(p, grid, cfg)?.holds(),
        minorants_exist,
        ac_fg_b,
        sum_eprime_convex,
        vp_equals_inf_b: vp.approx_eq(infimum_dc_over(&p.f, &p.g, &b), cfg.tol),
        gap: GapClass::classify(vp, &ds, cfg.tol),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TolandReport {
    pub primal: ExtReal,
    pub dual: ExtReal,
    pub g_econvex: bool,
    pub holds: bool,
}

/// `inf (f - g) = inf (g^c - f^c)` for e-convex `g`.
pub fn toland_check(f: &PiecewiseFn, g: &PiecewiseFn, cfg: &DualityConfig) -> TolandReport {
    let primal = infimum_dc_over(f, g, &Interval::REAL_LINE);
    let dual = inner_value(&c_conjugate(g), &c_conjugate(f), cfg);
    TolandReport { primal, dual, g_econvex: is_econvex(g), holds: primal.approx_eq(dual, cfg.tol) }
}

/// Three identities for `f - g` with e-convex `g`.
#[derive(Clone, Debug, Serialize)]
pub struct MoreResults {
    /// Every sampled minorant of `f - g` plus some minorant of `g` is a minorant of `f`.
    pub decomposition: bool,
    pub decomposition_samples: usize,
    /// `(f - g)^c` equals the intersection of translates of `epi f^c`.
    pub translate_intersection: bool,
    pub translate_max_dev: f64,
    /// The e'-hull generator of `epi (f-g)^c + epi δ_B^c` equals the
    /// supremum of sums of e-affine minorants of `f - g` and `δ_B`.
    pub etilde_conjugation: bool,
    pub etilde_max_dev: f64,
}

fn rel_dev(a: ExtReal, b: ExtReal) -> Option<f64> {
    match (a, b) {
        (ExtReal::Finite(u), ExtReal::Finite(v)) => Some((u - v).abs() / (1.0 + u.abs().max(v.abs()))),
        _ if a == b => Some(0.0),
        _ => None,
    }
}

pub fn prop_more_results_check(f: &PiecewiseFn, g: &PiecewiseFn, b: &Interval, cfg: &DualityConfig) -> Result<MoreResults> {
    if !is_econvex(g) {
        return Err(Error::InvalidProblem("g is not e-convex".into()));
    }
    let d = f.sub(g)?;
    let (dc, fc, gc) = (fenchel(&d), fenchel(f), fenchel(g));
    let r = cfg.w.radius;
    let window = |dom: Interval, n: usize| -> Vec<f64> {
        let (lo, hi) = (dom.lo().max(-r), dom.hi().min(r));
        if dom.is_empty() || lo > hi {
            return vec![];
        }
        let mut v = if lo < hi { linspace(lo, hi, n) } else { vec![lo] };
        v.retain(|&s| dom.contains(s));
        v
    };

    // (i): strips add up inside F(dom f) because F(dom g) contains (0, a) for every a > 0
    let feas_f = feas_region(f.domain_hull())?;
    let strips: Vec<(f64, f64)> = [-1.0, 0.0, 1.0]
        .iter()
        .filter_map(|&y| feas_f.min_support(y).finite().map(|m| (y, m + 1.0)))
        .collect();
    let u_grid = window(gc.domain(), 129);
    let mut decomposition = true;
    let mut samples = 0;
    for xs in window(dc.domain(), 9) {
        let ExtReal::Finite(base) = dc.eval(xs) else { continue };
        for beta in [base, base + 1.0] {
            for &(ys, a) in strips.iter().filter(|&&(ys, a)| feas_f.contains(ys, a)) {
                samples += 1;
                let slack = ExtReal::Finite(beta + cfg.tol * (1.0 + beta.abs()));
                let found = u_grid.iter().any(|&u| fc.eval(xs + u) <= gc.eval(u).add_lower(slack));
                decomposition &= found && feas_f.contains(ys, a + 1.0);
            }
        }
    }

    // (ii): sup_u f*(x* + u) - g*(u) against (f - g)*
    let mut translate_intersection =
        feas_region(d.domain_hull())?.is_subset_of(&feas_f) && feas_f.is_subset_of(&feas_region(d.domain_hull())?);
    let mut translate_max_dev: f64 = 0.0;
    for xs in linspace(-r, r, 2 * cfg.w.n + 1) {
        let neg = |u: f64| -(fc.eval(xs + u).sub_lower(gc.eval(u)));
        let sup = -minimize_sampled(&neg, &gc.domain(), cfg.window, cfg.nodes).value;
        match rel_dev(dc.eval(xs), sup) {
            Some(e) => {
                translate_max_dev = translate_max_dev.max(e);
                translate_intersection &= e <= cfg.tol;
            }
            None => translate_intersection = false,
        }
    }

    // (iii)
    let delta_b = PiecewiseFn::indicator(*b)?;
    let sum = EpiCSet::single(c_infconv(&c_conjugate(&d), &c_conjugate(&delta_b)));
    let phi = eprime_generator(&sum)?;
    let sup = sup_etilde(&d, &delta_b)?;
    let mut xs = linspace(-r, r, 4 * cfg.w.n + 1);
    for e in [b.lo(), b.hi()] {
        if e.is_finite() {
            xs.extend([e - 1e-6, e, e + 1e-6]);
        }
    }
    let mut etilde_conjugation = true;
    let mut etilde_max_dev: f64 = 0.0;
    for &x in &xs {
        match rel_dev(phi.eval(x), sup.eval(x)) {
            Some(e) => {
                etilde_max_dev = etilde_max_dev.max(e);
                etilde_conjugation &= e <= cfg.tol;
            }
            None => etilde_conjugation = false,
        }
    }
    Ok(MoreResults {
        decomposition,
        decomposition_samples: samples,
        translate_intersection,
        translate_max_dev,
        etilde_conjugation,
        etilde_max_dev,
    })
}
