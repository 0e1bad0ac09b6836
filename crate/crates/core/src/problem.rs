//! JSON problem files: named piecewise-polynomial functions, an objective
//! `f - g`, constraint ids and run configuration.
//!
//! Every scalar is a string (`"0.5"`, `"2/3"`, `"-inf"`) so that values and
//! interval openness survive a round trip bit for bit.

use serde::{Deserialize, Serialize};

use crate::duality::{DCProblem, DualityConfig, LambdaGrid};
use crate::episet::WGridConfig;
use crate::error::{Error, Result};
use crate::extreal::{Interval, Scalar};
use crate::poly::{Poly, MAX_DEGREE};
use crate::pwfn::{Piece, PiecewiseFn, ZeroWeight};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub functions: Vec<FunctionDef>,
    pub objective: Objective,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDef {
    pub id: String,
    pub pieces: Vec<PieceDef>,
}

/// A polynomial on an interval, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDef {
    pub interval: Interval,
    pub coefficients: Vec<Scalar>,
}

/// `g_id` absent means `g = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    pub f_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSpec {
    pub weights: Vec<Scalar>,
    pub max_active: usize,
}

impl Default for LambdaSpec {
    fn default() -> LambdaSpec {
        LambdaSpec { weights: (0..=10).map(|k| Scalar(2f64.powi(k) / 16.0)).collect(), max_active: 2 }
    }
}

/// Parameter values of a sampled constraint family, one per listed constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSample {
    pub parameter: String,
    pub values: Vec<Scalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroWeightSpec {
    KeepDomain,
    Drop,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub x_window: Scalar,
    pub grid_n: usize,
    pub w_grid_n: usize,
    pub w_radius: Scalar,
    pub lambda_grid: LambdaSpec,
    pub tolerance: Scalar,
    pub zero_weight: ZeroWeightSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint_sample: Option<ConstraintSample>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        let d = DualityConfig::default();
        RunConfig {
            x_window: Scalar(d.window),
            grid_n: d.nodes,
            w_grid_n: d.w.n,
            w_radius: Scalar(d.w.radius),
            lambda_grid: LambdaSpec::default(),
            tolerance: Scalar(d.tol),
            zero_weight: ZeroWeightSpec::KeepDomain,
            constraint_sample: None,
        }
    }
}

impl RunConfig {
    pub fn duality_config(&self) -> DualityConfig {
        DualityConfig {
            window: self.x_window.0,
            nodes: self.grid_n,
            tol: self.tolerance.0,
            w: WGridConfig { n: self.w_grid_n, radius: self.w_radius.0, tol: self.tolerance.0 },
        }
    }
}

/// A validated problem with its grids.
#[derive(Clone, Debug)]
pub struct LoadedProblem {
    pub problem: DCProblem,
    pub lambda: LambdaGrid,
    pub config: DualityConfig,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn function(&self, id: &str) -> Result<PiecewiseFn> {
        let def = self
            .functions
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| Error::InvalidProblem(format!("unknown function id `{id}`")))?;
        def.to_piecewise()
    }

    pub fn load(&self) -> Result<LoadedProblem> {
        let mut seen = std::collections::HashSet::new();
        for d in &self.functions {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::InvalidProblem(format!("duplicate function id `{}`", d.id)));
            }
        }
        let c = &self.config;
        if c.grid_n < 3 || c.w_grid_n < 2 {
            return Err(Error::InvalidProblem("grid sizes must be at least 3 (1-D) and 2 (W)".into()));
        }
        if !(c.tolerance.0 > 0.0 && c.x_window.0 > 0.0 && c.w_radius.0 > 0.0) {
            return Err(Error::InvalidProblem("tolerance, x_window and w_radius must be positive".into()));
        }
        if c.lambda_grid.weights.iter().any(|w| !(w.0.is_finite() && w.0 > 0.0)) {
            return Err(Error::InvalidProblem("lambda weights must be finite and positive".into()));
        }
        if let Some(s) = &c.constraint_sample {
            if s.values.len() != self.constraints.len() {
                return Err(Error::InvalidProblem("constraint_sample needs one value per constraint".into()));
            }
        }
        let f = self.function(&self.objective.f_id)?;
        let g = match &self.objective.g_id {
            Some(id) => self.function(id)?,
            None => PiecewiseFn::zero(),
        };
        let hs = self.constraints.iter().map(|id| Ok((id.clone(), self.function(id)?))).collect::<Result<Vec<_>>>()?;
        let zero_weight = match c.zero_weight {
            ZeroWeightSpec::KeepDomain => ZeroWeight::KeepDomain,
            ZeroWeightSpec::Drop => ZeroWeight::Drop,
        };
        let problem = DCProblem::new(f, g, hs)?.with_zero_weight(zero_weight);
        let lambda = LambdaGrid::with_weights(
            self.constraints.len(),
            c.lambda_grid.weights.iter().map(|w| w.0).collect(),
            c.lambda_grid.max_active,
        );
        Ok(LoadedProblem { problem, lambda, config: c.duality_config() })
    }
}

impl FunctionDef {
    pub fn to_piecewise(&self) -> Result<PiecewiseFn> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let coeffs: Vec<f64> = p.coefficients.iter().map(|c| c.0).collect();
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPieces(format!("`{}` has a non-finite coefficient", self.id)));
            }
            let poly = Poly::new(coeffs);
            if poly.degree() > MAX_DEGREE {
                return Err(Error::DegreeTooHigh(poly.degree()));
            }
            pieces.push(Piece::new(p.interval, poly));
        }
        PiecewiseFn::new(pieces)
    }

    pub fn from_piecewise(id: &str, f: &PiecewiseFn) -> FunctionDef {
        FunctionDef {
            id: id.to_string(),
            pieces: f
                .pieces()
                .iter()
                .map(|p| PieceDef { interval: p.interval, coefficients: p.poly.coeffs().iter().map(|&c| Scalar(c)).collect() })
                .collect(),
        }
    }
}
