//! Library side of the `mtem` command-line tool: config parsing and resolution,
//! error records, and the four workflows.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{exit_status, run, Command, Outcome};
pub use config::{parse_config, Overrides, Resolved, RunConfig};
pub use error::CliError;
