//! Report envelope shared by every command: a result, the input it came from
//! and the grids and conventions it was computed under.

use serde::Serialize;

use ecvx_core::extreal::{fmt_scalar, Scalar};
use ecvx_core::problem::{ConstraintSample, RunConfig, ZeroWeightSpec};
use ecvx_core::{DualValue, ExtReal};

pub const CONVENTIONS: [&str; 4] = [
    "inner infima of G - Phi run over dom G, with finite - (+inf) = -inf",
    "a zero multiplier keeps the constraint domain (0 h = indicator of dom h)",
    "dual values are suprema over the listed lambda grid, hence lower bounds of the true suprema",
    "set comparisons and hull checks are exact per grid point and only as fine as the W grid",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Both,
}

/// Human-readable rendering of a result.
pub trait TextBlock {
    fn text(&self) -> String;
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub x_window: Scalar,
    pub grid_n: usize,
    pub w_grid_n: usize,
    pub w_radius: Scalar,
    pub tolerance: Scalar,
    pub lambda_weights: Vec<Scalar>,
    pub max_active: usize,
    pub lambda_points: usize,
    pub zero_weight: ZeroWeightSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint_sample: Option<ConstraintSample>,
    pub conventions: Vec<&'static str>,
}

impl Provenance {
    pub fn new(c: &RunConfig, lambda_points: usize) -> Provenance {
        Provenance {
            version: env!("CARGO_PKG_VERSION"),
            x_window: c.x_window,
            grid_n: c.grid_n,
            w_grid_n: c.w_grid_n,
            w_radius: c.w_radius,
            tolerance: c.tolerance,
            lambda_weights: c.lambda_grid.weights.clone(),
            max_active: c.lambda_grid.max_active,
            lambda_points,
            zero_weight: c.zero_weight,
            constraint_sample: c.constraint_sample.clone(),
            conventions: CONVENTIONS.to_vec(),
        }
    }
}

impl TextBlock for Provenance {
    fn text(&self) -> String {
        let weights: Vec<String> = self.lambda_weights.iter().map(|w| fmt_scalar(w.0)).collect();
        let mut out = format!(
            "grids: x window {}, {} nodes, W grid {} points per axis (radius {}), tolerance {}\n",
            fmt_scalar(self.x_window.0),
            self.grid_n,
            self.w_grid_n,
            fmt_scalar(self.w_radius.0),
            fmt_scalar(self.tolerance.0),
        );
        out += &format!(
            "lambda grid: size {}, weights {{0, {}}}, at most {} active\n",
            self.lambda_points,
            weights.join(", "),
            self.max_active
        );
        if let Some(s) = &self.constraint_sample {
            let vals: Vec<String> = s.values.iter().map(|v| fmt_scalar(v.0)).collect();
            out += &format!("constraint sample: {} in {{{}}}\n", s.parameter, vals.join(", "));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub command: &'static str,
    pub input: String,
    pub result: T,
    pub provenance: Provenance,
}

impl<T: Serialize + TextBlock> Report<T> {
    pub fn render(&self, format: Format) -> String {
        let json = serde_json::to_string_pretty(self).expect("reports always serialize");
        let text = format!("ecvx {} {}\n\n{}\n{}", self.command, self.input, self.result.text(), self.provenance.text());
        match format {
            Format::Text => text,
            Format::Json => json + "\n",
            Format::Both => format!("{text}\n{json}\n"),
        }
    }
}

pub fn fmt_value(v: ExtReal) -> String {
    v.to_string()
}

pub fn fmt_lambda(lam: &[f64]) -> String {
    let parts: Vec<String> = lam.iter().map(|&l| fmt_scalar(l)).collect();
    format!("({})", parts.join(", "))
}

pub fn fmt_dual(d: &DualValue) -> String {
    match &d.argmax {
        Some(lam) => format!("{} attained at lambda = {}", fmt_value(d.value), fmt_lambda(lam)),
        None => format!("{} (not attained on the grid)", fmt_value(d.value)),
    }
}
