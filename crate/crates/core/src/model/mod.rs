//! Problem definition: coefficients, delay, initial history and the sampled
//! checks deciding whether the polynomial stability results apply.

mod coefficients;
mod delay;
mod history;
pub mod poly;
mod problem;
mod validate;

pub use coefficients::{CoefficientSet, DiffusionFn, DriftFn, EnvelopeFn, StructuralConstants};
pub use delay::{DelayFn, DelayFunction};
pub use history::{HistoryFn, InitialHistory};
pub use problem::{
    delay_multiplicity_bound, stability_margin, CompatibilityReport, SddeProblem,
    COMPATIBILITY_TOLERANCE,
};
pub use validate::{
    state_samples, validate_problem, Finding, Severity, ValidationReport, DEFAULT_TIMES,
};
