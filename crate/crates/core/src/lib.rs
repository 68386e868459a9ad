//! Modified truncated Euler-Maruyama (MTEM) simulation of stochastic
//! differential equations with time-dependent (bounded or unbounded) delay,
//! together with the polynomial stability toolkit: theoretical rate
//! constants, sampled structural checks and empirical decay statistics.
//!
//! ```no_run
//! use mtem_core::experiments::{build_example, run_reproduction, ExampleName};
//!
//! let exp = build_example(ExampleName::Example1).unwrap();
//! let report = run_reproduction(&exp, 2024, 10).unwrap();
//! println!("{}", report.summary());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod integrator;
pub mod linalg;
pub mod model;
pub mod stability;
pub mod truncation;

pub use error::{MtemError, Result};
pub use integrator::{
    delay_lag, mtem_step, simulate_ensemble, simulate_ensemble_with_workers, simulate_path,
    BrownianSource, PathRecord, SimulationGrid,
};
pub use linalg::Matrix;
pub use model::{
    validate_problem, CoefficientSet, DelayFunction, InitialHistory, SddeProblem,
    StructuralConstants, ValidationReport,
};
pub use stability::{
    c_tilde_unbounded, counting_check, decay_statistics, epsilon_window, mean_square_statistic,
    solve_c_tilde_bounded, solve_gamma0_exact, DecayStatistics, ExactRateCertificate,
    RateCertificate, Regime,
};
pub use truncation::{truncation_factor, TruncatedCoefficients, TruncationPolicy};
