use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MtemError {
    #[error("non-finite state")]
    NonFiniteState,

    #[error("coefficient overflow at point (x = {x:?}, y = {y:?}, t = {t})")]
    CoefficientOverflow { x: Vec<f64>, y: Vec<f64>, t: f64 },

    #[error("coincident inputs")]
    CoincidentInputs,

    #[error("policy inverse unavailable")]
    PolicyInverseUnavailable,

    #[error("negative delay {value} at step {k}")]
    NegativeDelay { k: usize, value: f64 },

    #[error("index before history: {index} < -{m}")]
    IndexBeforeHistory { index: i64, m: usize },

    #[error("index {index} beyond recorded maximum {max}")]
    IndexAfterRecord { index: i64, max: usize },

    #[error("state overflow at step {step}")]
    StateOverflow { step: usize },

    #[error("state overflow in {} path(s): {failures:?} (path_index, step)", failures.len())]
    EnsembleOverflow { failures: Vec<(u64, usize)> },

    #[error("epsilon outside admissible window: {epsilon} not in ({lo}, {hi})")]
    EpsilonOutsideWindow { epsilon: f64, lo: f64, hi: f64 },

    #[error("no positive root (F(0) = {f0} >= 0)")]
    NoPositiveRoot { f0: f64 },

    #[error("stability margin non-positive ({margin})")]
    MarginNonPositive { margin: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    RootNotConverged { iterations: usize },

    #[error("inconsistent ensemble: {0}")]
    InconsistentEnsemble(String),

    #[error(
        "tau/dt = {ratio} is not within 1e-9 of an integer (tau = {tau}, dt = {dt}); admissible dt: {suggestions:?}"
    )]
    GridNotAdmissible {
        tau: f64,
        dt: f64,
        ratio: f64,
        suggestions: Vec<f64>,
    },

    #[error("unknown example '{0}' (expected example1 or example2)")]
    UnknownExample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MtemError {
    fn from(e: std::io::Error) -> Self {
        MtemError::Io(e.to_string())
    }
}

impl From<csv::Error> for MtemError {
    fn from(e: csv::Error) -> Self {
        MtemError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for MtemError {
    fn from(e: serde_json::Error) -> Self {
        MtemError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MtemError>;
