//! Circle fibrations from closed nonsingular 1-cochains.
//!
//! [`rationalize`] moves the periods of a closed cochain to nearby rationals,
//! [`integrate_to_circle`] integrates the result to a map into `R/Z`,
//! [`check_submersion`] and [`fiber_census`] inspect that map, and
//! [`pipeline_sln`] chains these behind the projection of an SL(n)
//! foliation onto its abelian factor.

mod circle;
mod pipeline;
mod rationalize;

use thiserror::Error;

use crate::complex::ComplexError;
use crate::foliation::FoliationError;
use crate::linalg::Rational;

pub use circle::{
    check_submersion, fiber_census, generic_values, integrate_to_circle, integrate_to_circle_with,
    CircleMap, FiberCensus, SubmersionReport, TreeKind,
};
pub use pipeline::{
    pipeline_sln, PipelineConfig, PipelineError, PipelineOutput, PipelineReport, StageRecord,
};
pub use rationalize::{
    convergents, rationalize, rationalize_exact, RationalizeConfig, Rationalized,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TischlerError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cochain is not closed (max |dw| = {max_residual:e} on triangle {triangle})")]
    NotClosed { max_residual: f64, triangle: usize },
    #[error("complex carries no homology basis")]
    MissingHomology,
    #[error("cycles do not span H_1 (exactness defect {0:e})")]
    CyclesDoNotSpan(f64),
    #[error("period {index} = {period}: best convergent {best} within denominator cap misses by {error:e}")]
    BudgetInfeasible {
        index: usize,
        period: f64,
        best: Rational,
        error: f64,
    },
    #[error("perturbation {achieved:e} exceeds budget {epsilon:e}")]
    PerturbationTooLarge { achieved: f64, epsilon: f64 },
    #[error("complex is not connected")]
    Disconnected,
    #[error("edge {edge}: map increment disagrees with q*w' modulo 1")]
    IncrementMismatch { edge: usize },
    #[error("value {0} is the image of a vertex")]
    NonGenericValue(Rational),
    #[error("level set is inconsistent on simplex {0}")]
    InconsistentLift(usize),
    #[error("no submersive combination among {} tried", tried.len())]
    NoSubmersion { tried: Vec<Vec<i64>> },
    #[error("circle map is singular on {} top simplices", .0.len())]
    SingularMap(Vec<usize>),
    #[error("unsupported transverse group {0}")]
    UnsupportedGroup(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
}
