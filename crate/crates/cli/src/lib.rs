//! Command-line front end: problem-file ingestion, command dispatch and
//! report emission.

pub mod commands;
pub mod report;
pub mod reproduce;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ecvx_core::extreal::{parse_scalar, Scalar};
use ecvx_core::{Error, LoadedProblem, ProblemFile};

pub use report::Format;
pub use reproduce::ExampleId;

#[derive(Debug, Parser)]
#[command(name = "ecvx", version, about = "Lagrange-type duality for DC programs with evenly convex data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output: human-readable text, JSON, or text followed by JSON.
    #[arg(long, value_enum, default_value_t = Format::Both, global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primal value, the three Lagrange-type dual values and gap classes.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Regularity conditions, with witnesses where they fail.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = commands::Which::All)]
        check: commands::Which,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Rerun a bundled example and compare against its expected table.
    Reproduce {
        #[arg(value_enum)]
        id: ExampleId,
    },
    /// ε-c-subdifferential of a problem function at a point.
    Subdiff {
        file: PathBuf,
        #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
        at: f64,
        #[arg(long, value_parser = parse_scalar, default_value = "0")]
        eps: f64,
        /// Function id; defaults to the objective's f.
        #[arg(long)]
        function: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

/// Overrides of the problem file's run configuration.
#[derive(Debug, Default, Clone, Args)]
pub struct GridArgs {
    /// Keep only multiplier weights up to this value.
    #[arg(long, value_parser = parse_scalar)]
    pub lambda_max: Option<f64>,
    /// Nodes of the 1-D grids.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Points per axis of the W grid.
    #[arg(long)]
    pub w_grid: Option<usize>,
    #[arg(long, value_parser = parse_scalar)]
    pub tol: Option<f64>,
}

impl GridArgs {
    pub fn apply(&self, file: &mut ProblemFile) {
        let c = &mut file.config;
        if let Some(m) = self.lambda_max {
            c.lambda_grid.weights.retain(|w| w.0 <= m);
        }
        if let Some(n) = self.grid {
            c.grid_n = n;
        }
        if let Some(n) = self.w_grid {
            c.w_grid_n = n;
        }
        if let Some(t) = self.tol {
            c.tolerance = Scalar(t);
        }
    }
}

/// Failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input: exit 2.
    Input(String),
    /// Well-formed input describing an invalid problem or query: exit 3.
    Invalid(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Parse { .. } => CliError::Input(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

/// Rendered output and the exit code it should end with.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn read_problem(path: &PathBuf, grid: &GridArgs) -> Result<(ProblemFile, LoadedProblem), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut file = ProblemFile::from_json(&text)?;
    grid.apply(&mut file);
    let loaded = file.load()?;
    Ok((file, loaded))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let ok = |stdout: String| Ok(Outcome { stdout, code: 0 });
    match &cli.command {
        Command::Eval { file, grid } => {
            let (pf, lp) = read_problem(file, grid)?;
            ok(commands::eval(&file.display().to_string(), &pf, &lp).render(cli.format))
        }
        Command::Check { file, check, grid } => {
            let (pf, lp) = read_problem(file, grid)?;
            ok(commands::check(&file.display().to_string(), &pf, &lp, *check)?.render(cli.format))
        }
        Command::Subdiff { file, at, eps, function, grid } => {
            let (pf, lp) = read_problem(file, grid)?;
            let id = function.clone().unwrap_or_else(|| pf.objective.f_id.clone());
            ok(commands::subdiff(&file.display().to_string(), &pf, &lp, &id, *at, *eps)?.render(cli.format))
        }
        Command::Reproduce { id } => {
            let report = reproduce::reproduce(*id)?;
            Ok(Outcome { stdout: report.render(cli.format), code: report.result.exit_code() })
        }
    }
}

/// Sizes the global thread pool from `ECVX_THREADS` when set to a positive integer.
pub fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ECVX_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("ECVX_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("ECVX_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
