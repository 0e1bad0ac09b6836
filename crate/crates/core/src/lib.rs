//! Conjugate duality for difference-of-convex programs with evenly convex data.

pub mod conj;
pub mod duality;
pub mod episet;
pub mod error;
pub mod extreal;
pub mod fixtures;
pub mod hull;
mod numeric;
pub mod poly;
pub mod problem;
pub mod pwfn;
pub mod subdiff;

pub use conj::{CConjugate, CPrimeConjugate, Conjugate, FeasRegion};
pub use duality::{DCProblem, DualValue, DualityConfig, DualityReport, GapClass, LambdaGrid};
pub use episet::{EpiCSet, WGridConfig};
pub use error::{Error, Result};
pub use extreal::{ExtReal, Interval, Scalar};
pub use hull::{HullConfig, HullResult, Provenance};
pub use numeric::linspace;
pub use poly::Poly;
pub use problem::{LoadedProblem, ProblemFile};
pub use pwfn::{DCFn, Infimum, Piece, PiecewiseFn, ZeroWeight};
