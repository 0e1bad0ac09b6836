//! Bundled problem files for the worked examples.

use crate::error::{Error, Result};
use crate::problem::ProblemFile;

pub const NAMES: [&str; 6] = ["weak_gap", "set_b", "sets_ab", "eccq_not_necessary", "closed_sum", "affine"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "weak_gap" => include_str!("../fixtures/weak_gap.json"),
        "set_b" => include_str!("../fixtures/set_b.json"),
        "sets_ab" => include_str!("../fixtures/sets_ab.json"),
        "eccq_not_necessary" => include_str!("../fixtures/eccq_not_necessary.json"),
        "closed_sum" => include_str!("../fixtures/closed_sum.json"),
        "affine" => include_str!("../fixtures/affine.json"),
        _ => return None,
    })
}

pub fn problem_file(name: &str) -> Result<ProblemFile> {
    let text = source(name).ok_or_else(|| Error::InvalidProblem(format!("no bundled fixture `{name}`")))?;
    ProblemFile::from_json(text)
}
