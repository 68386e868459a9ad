//! Uniform grids, Brownian increments and the modified truncated
//! Euler-Maruyama recursion for single paths and ensembles.

mod brownian;
mod grid;
mod path;
mod scheme;

pub use brownian::{BrownianSource, BrownianStream};
pub use grid::{admissible_steps, SimulationGrid};
pub use path::{ensemble_to_json, format_float, write_ensemble_csv, PathRecord};
pub use scheme::{
    delay_lag, mtem_step, simulate_ensemble, simulate_ensemble_with_workers, simulate_path,
    OVERFLOW_THRESHOLD,
};
