use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mtem_cli::config::{EpsilonSpec, OutputFormat};
use mtem_cli::{exit_status, parse_config, run, CliError, Command, Overrides, RunConfig};
use mtem_core::experiments::ExampleName;

/// Modified truncated Euler-Maruyama simulations and polynomial stability
/// certificates for SDEs with time-dependent delay.
#[derive(Parser)]
#[command(name = "mtem", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate an ensemble and write paths and decay statistics.
    Simulate(RunArgs),
    /// Compute the rate certificates for the configured problem.
    Certify(RunArgs),
    /// Re-run a named example and grade its expected observations.
    Reproduce(RunArgs),
    /// Validate the problem: structural findings, delay counting and truncation compatibility.
    Check(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Named example, same as --example.
    #[arg(value_name = "EXAMPLE")]
    example_arg: Option<ExampleName>,
    /// JSON run configuration (schema "mtem/1").
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    example: Option<ExampleName>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number, or "midpoint" for the middle of the admissible window.
    #[arg(long)]
    epsilon: Option<EpsilonSpec>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MTEM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Usage(format!(
            "MTEM_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn execute(command: Command, args: RunArgs) -> Result<bool, CliError> {
    let example = match (args.example_arg, args.example) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Usage(format!("conflicting examples {a} and {b}")))
        }
        (a, b) => a.or(b),
    };
    let mut config = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            parse_config(&text)?
        }
        None => {
            let name = example
                .ok_or_else(|| CliError::Usage("give --config PATH or an example name".into()))?;
            RunConfig::for_example(name)
        }
    };
    config.apply(&Overrides {
        example,
        dt: args.dt,
        steps: args.steps,
        paths: args.paths,
        seed: args.seed,
        epsilon: args.epsilon,
        out: args.out,
        format: args.format,
    })?;
    let resolved = config.resolve()?;
    configure_threads()?;
    let outcome = run(command, &resolved)?;
    if !args.quiet {
        print!("{}", outcome.summary);
        for a in &outcome.artifacts {
            println!("wrote {}", a.display());
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::Reproduce(a) => (Command::Reproduce, a),
        Cmd::Check(a) => (Command::Check, a),
    };
    match execute(command, args) {
        Ok(passed) => ExitCode::from(exit_status(passed)),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(2)
        }
    }
}
