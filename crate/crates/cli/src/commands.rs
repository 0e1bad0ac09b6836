//! `eval`, `check` and `subdiff`.

use serde::Serialize;

use ecvx_core::duality::{
    check_ac, check_ecc, check_eccq, check_eccq2, evaluate, feasible_set, set_b, thm31ii_conjugate_formula, AcReport,
    Eccq2Report,
};
use ecvx_core::episet::SetComparison;
use ecvx_core::extreal::fmt_scalar;
use ecvx_core::hull::is_econvex;
use ecvx_core::subdiff::{c_subdiff, lemma9_reconstruct, thm31iii_check};
use ecvx_core::{DualValue, ExtReal, GapClass, Interval, LoadedProblem, PiecewiseFn, ProblemFile};

use crate::report::{fmt_dual, fmt_value, Provenance, Report, TextBlock};
use crate::CliError;

fn provenance(pf: &ProblemFile, lp: &LoadedProblem) -> Provenance {
    Provenance::new(&pf.config, lp.lambda.points().len())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalResult {
    pub set_a: Interval,
    pub v_primal: ExtReal,
    pub v_dual_standard: DualValue,
    pub v_dual_bar: DualValue,
    pub v_dual_tilde: DualValue,
    pub gap_standard: GapClass,
    pub gap_tilde: GapClass,
    pub g_econvex: bool,
    pub warnings: Vec<String>,
}

impl TextBlock for EvalResult {
    fn text(&self) -> String {
        let mut out = format!("feasible set A   {}\n", self.set_a);
        out += &format!("v(P)             {}\n", fmt_value(self.v_primal));
        out += &format!("v(D_L)           {}\n", fmt_dual(&self.v_dual_standard));
        out += &format!("v(D_L bar)       {}\n", fmt_dual(&self.v_dual_bar));
        out += &format!("v(D_L tilde)     {}\n", fmt_dual(&self.v_dual_tilde));
        out += &format!("gap, D_L         {}\n", self.gap_standard.as_str());
        out += &format!("gap, D_L tilde   {}\n", self.gap_tilde.as_str());
        out += &format!("g e-convex       {}\n", yes_no(self.g_econvex));
        if !self.g_econvex {
            out += "note: v(D_L bar) = v(D_L) is only guaranteed for e-convex g\n";
        }
        for w in &self.warnings {
            out += &format!("warning: {w}\n");
        }
        out
    }
}

pub fn eval(input: &str, pf: &ProblemFile, lp: &LoadedProblem) -> Report<EvalResult> {
    let (p, cfg) = (&lp.problem, &lp.config);
    let (vp, ds, db, dt) = evaluate(p, &lp.lambda, cfg);
    let result = EvalResult {
        set_a: feasible_set(p),
        v_primal: vp,
        gap_standard: GapClass::classify(vp, &ds, cfg.tol),
        gap_tilde: GapClass::classify(vp, &dt, cfg.tol),
        v_dual_standard: ds,
        v_dual_bar: db,
        v_dual_tilde: dt,
        g_econvex: is_econvex(&p.g),
        warnings: p.warnings().to_vec(),
    };
    Report { command: "eval", input: input.to_string(), result, provenance: provenance(pf, lp) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Ac,
    Eccq,
    Eccq2,
    Ecc,
    All,
}

/// Subdifferential sum formula at one point.
#[derive(Clone, Debug, Serialize)]
pub struct SubdiffPoint {
    pub xbar: f64,
    pub eps: f64,
    pub equal: bool,
}

/// The closedness condition against the conjugate and subdifferential formulas.
#[derive(Clone, Debug, Serialize)]
pub struct CrossValidation {
    pub hypotheses_met: bool,
    pub ecc: bool,
    pub conjugate_formula: bool,
    pub subdifferential: Vec<SubdiffPoint>,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub set_a: Interval,
    pub set_b: Interval,
    /// `(AC)` for `f` and `δ_B`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ac: Option<AcReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eccq: Option<SetComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eccq2: Option<Eccq2Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ecc: Option<SetComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_econvex: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_validation: Option<CrossValidation>,
}

fn comparison_line(name: &str, c: &SetComparison) -> String {
    let mut line = format!("{name:<28}{}", c.equal());
    if let Some(w) = &c.witness {
        let side = if w.in_first { "first set only" } else { "second set only" };
        let [x, y, a] = w.w.map(|v| fmt_scalar(v + 0.0));
        line += &format!("  witness (x*, y*, a) = ({x}, {y}, {a}), beta = {} in {side}", fmt_scalar(w.beta + 0.0));
    }
    line + "\n"
}

impl TextBlock for CheckResult {
    fn text(&self) -> String {
        let mut out = String::new();
        out += &format!("feasible set A              {}\nB                           {}\n", self.set_a, self.set_b);
        if let Some(ac) = &self.ac {
            out += &format!("{:<28}{}", "AC(f, delta_B)", ac.holds);
            match ac.witness {
                Some(x) => out += &format!("  fails at x = {x}, max deviation {:.3e}\n", ac.max_deviation),
                None => out += &format!("  max deviation {:.3e}\n", ac.max_deviation),
            }
        }
        if let Some(c) = &self.eccq {
            out += &comparison_line("ECCQ", c);
        }
        if let Some(r) = &self.eccq2 {
            out += &comparison_line("ECCQII (K e'-convex)", &r.eprime_convex);
            out += &comparison_line("  e'-hull of K = epi d_B^c", &r.hull_matches_b);
        }
        if let Some(c) = &self.ecc {
            out += &comparison_line("ECC", c);
        }
        if let Some(g) = self.g_econvex {
            out += &format!("{:<28}{g}\n", "g e-convex");
        }
        if let Some(x) = &self.cross_validation {
            out += &format!(
                "{:<28}hypotheses {}, ECC {}, conjugate formula {}, subdifferential formula {}/{} points, agree {}\n",
                "closedness cross-check",
                yes_no(x.hypotheses_met),
                x.ecc,
                x.conjugate_formula,
                x.subdifferential.iter().filter(|s| s.equal).count(),
                x.subdifferential.len(),
                x.agree
            );
        }
        out
    }
}

/// Up to five points of `dom f ∩ B`, closed ends first.
fn sample_points(f: &PiecewiseFn, b: &Interval) -> Vec<f64> {
    let Ok(fb) = f.restrict(b) else { return vec![] };
    let d = fb.domain_hull();
    let mut pts: Vec<f64> = [d.lo(), d.hi()].into_iter().filter(|x| x.is_finite() && fb.in_domain(*x)).collect();
    let (lo, hi) = (d.lo().max(-3.0), d.hi().min(3.0));
    if lo < hi {
        pts.extend((0..5).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 5.0));
    }
    pts.retain(|&x| fb.eval(x).is_finite());
    pts.dedup();
    pts.truncate(5);
    pts
}

pub fn check(input: &str, pf: &ProblemFile, lp: &LoadedProblem, which: Which) -> Result<Report<CheckResult>, CliError> {
    let (p, grid, cfg) = (&lp.problem, &lp.lambda, &lp.config);
    let all = which == Which::All;
    let b = set_b(p, grid);
    let mut r = CheckResult {
        set_a: feasible_set(p),
        set_b: b,
        ac: None,
        eccq: None,
        eccq2: None,
        ecc: None,
        g_econvex: None,
        cross_validation: None,
    };
    if all || which == Which::Ac {
        r.ac = Some(check_ac(&p.f, &PiecewiseFn::indicator(b)?, cfg)?);
    }
    if all || which == Which::Eccq {
        r.eccq = Some(check_eccq(p, grid, cfg)?);
    }
    if all || which == Which::Eccq2 {
        r.eccq2 = Some(check_eccq2(p, grid, cfg)?);
    }
    if all || which == Which::Ecc {
        r.ecc = Some(check_ecc(p, grid, cfg)?);
    }
    if all {
        r.g_econvex = Some(is_econvex(&p.g));
        let formula = thm31ii_conjugate_formula(p, grid, cfg)?;
        let ecc = r.ecc.as_ref().map(|c| c.equal()).unwrap_or(false);
        let hs: Vec<PiecewiseFn> = p.constraints.iter().map(|(_, h)| h.clone()).collect();
        let lambdas = grid.points();
        let epss = [0.0, 0.25, 0.5, 1.0, 2.0];
        let mut points = Vec::new();
        for (k, xbar) in sample_points(&p.f, &b).into_iter().enumerate() {
            let eps = epss[k % epss.len()];
            let s = thm31iii_check(&p.f, &hs, &b, xbar, eps, &lambdas, p.zero_weight, &cfg.w)?;
            points.push(SubdiffPoint { xbar, eps, equal: s.equal });
        }
        let iii = points.iter().all(|s| s.equal);
        r.cross_validation = Some(CrossValidation {
            hypotheses_met: formula.hypotheses_met(),
            ecc,
            conjugate_formula: formula.holds,
            agree: ecc == formula.holds && formula.holds == iii,
            subdifferential: points,
        });
    }
    Ok(Report { command: "check", input: input.to_string(), result: r, provenance: provenance(pf, lp) })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdiffResult {
    pub function: String,
    pub xbar: f64,
    pub eps: f64,
    pub value: ExtReal,
    /// ε-subgradients in the `x*` coordinate.
    pub xstar: Interval,
    /// `dom f`; `(y*, a)` must satisfy `x y* < a` on all of it.
    pub domain: Interval,
    pub reconstruction_equal: bool,
    pub reconstruction_residual: f64,
}

impl TextBlock for SubdiffResult {
    fn text(&self) -> String {
        let mut out = format!("function         {} at x = {}, eps = {}\n", self.function, self.xbar, self.eps);
        out += &format!("value            {}\n", fmt_value(self.value));
        if self.xstar.is_empty() {
            out += "eps-c-subdifferential is empty\n";
        } else {
            out += &format!("x* in            {}\n", self.xstar);
            out += &format!("(y*, a) in       {{x y* < a for every x in {}}}\n", self.domain);
            out += &format!("band             {} y* < a\n", self.xbar);
        }
        out += &format!(
            "epigraph rebuilt from eps-subdifferentials: {} (max residual {:.3e})\n",
            if self.reconstruction_equal { "matches" } else { "differs" },
            self.reconstruction_residual
        );
        out
    }
}

pub fn subdiff(input: &str, pf: &ProblemFile, lp: &LoadedProblem, id: &str, xbar: f64, eps: f64) -> Result<Report<SubdiffResult>, CliError> {
    let f = pf.function(id)?;
    if !f.in_domain(xbar) || !f.eval(xbar).is_finite() {
        return Err(ecvx_core::Error::OutOfDomain(xbar).into());
    }
    if !(eps >= 0.0) {
        return Err(CliError::Invalid(format!("eps must be non-negative, got {eps}")));
    }
    let s = c_subdiff(&f, xbar, eps);
    let rec = lemma9_reconstruct(&f, xbar, &lp.config.w)?;
    let result = SubdiffResult {
        function: id.to_string(),
        xbar,
        eps,
        value: f.eval(xbar),
        xstar: s.xstar,
        domain: f.domain_hull(),
        reconstruction_equal: rec.equal,
        reconstruction_residual: rec.max_residual,
    };
    Ok(Report { command: "subdiff", input: input.to_string(), result, provenance: provenance(pf, lp) })
}
