//! Versioned JSON run configuration.
//!
//! A config names exactly one problem source: a built-in `example` or an
//! `inline` polynomial problem. Every other section is optional and falls
//! back to the example's locked values or to the defaults below. Resolution
//! produces a fully explicit config that is echoed into every output.

use std::path::PathBuf;

use mtem_core::experiments::{build_example, ExampleName, DEFAULT_SEEDS, TRUNCATION_EXPONENT};
use mtem_core::model::poly::PolynomialCoefficients;
use mtem_core::stability::window_midpoint;
use mtem_core::{
    DelayFunction, InitialHistory, Regime, SddeProblem, SimulationGrid, TruncationPolicy,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: &str = "mtem/1";
pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_OUT_DIR: &str = "mtem-out";
const INLINE_DT: f64 = 0.1;
const INLINE_STEPS: usize = 1000;

fn default_schema() -> String {
    SCHEMA.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<InlineProblem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    /// Shorthand for `ensemble.paths`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSpec>,
    /// Shorthand for `output.dir`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    pub coefficients: PolynomialCoefficients,
    pub delay: DelaySpec,
    /// Constant initial segment.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DelaySpec {
    Constant {
        tau: f64,
    },
    /// `δ(t) = (1 - q) t`.
    Pantograph {
        q: f64,
    },
    /// `δ(t) = τ + c (1 - e^{-t})`.
    Saturating {
        tau: f64,
        c: f64,
    },
}

impl DelaySpec {
    fn build(&self) -> mtem_core::Result<DelayFunction> {
        match *self {
            DelaySpec::Constant { tau } => DelayFunction::constant(tau),
            DelaySpec::Pantograph { q } => DelayFunction::pantograph(q),
            DelaySpec::Saturating { tau, c } => DelayFunction::saturating(tau, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PolicySpec {
    /// `h(Δ) = Δ^{-exponent}`.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonKeyword {
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Value(f64),
    Keyword(EpsilonKeyword),
}

impl std::str::FromStr for EpsilonSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "midpoint" {
            return Ok(EpsilonSpec::Keyword(EpsilonKeyword::Midpoint));
        }
        s.parse::<f64>()
            .map(EpsilonSpec::Value)
            .map_err(|_| format!("expected a number or \"midpoint\", got {s:?}"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<EpsilonSpec>,
    /// Weight exponents for the mean-square curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

/// Command-line values that take precedence over the config document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub example: Option<ExampleName>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon: Option<EpsilonSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// Parses a config document. Syntax errors carry line and column; unknown
/// keys and violated invariants are reported separately.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let config: RunConfig = serde_json::from_str(text).map_err(CliError::from_json)?;
    config.check()?;
    Ok(config)
}

fn invalid(invariant: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        invariant: invariant.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn for_example(name: ExampleName) -> Self {
        RunConfig {
            schema: default_schema(),
            example: Some(name),
            inline: None,
            policy: None,
            grid: None,
            ensemble: None,
            seeds: None,
            analysis: None,
            out: None,
            output: None,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks the structural invariants that do not need the problem.
    pub fn check(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(invalid(
                "schema is mtem/1",
                format!("unsupported schema {:?}", self.schema),
            ));
        }
        if self.example.is_some() == self.inline.is_some() {
            return Err(invalid(
                "exactly one of example, inline",
                "the config must name exactly one of `example` or `inline`",
            ));
        }
        if let Some(dt) = self.grid.as_ref().and_then(|g| g.dt) {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("dt > 0", format!("grid.dt = {dt}")));
            }
        }
        if self.grid.as_ref().and_then(|g| g.steps) == Some(0) {
            return Err(invalid("steps >= 1", "grid.steps = 0"));
        }
        let paths = self.ensemble.as_ref().and_then(|e| e.paths);
        if paths == Some(0) || self.seeds == Some(0) {
            return Err(invalid("n_paths >= 1", "ensemble.paths = 0"));
        }
        if paths.is_some() && self.seeds.is_some() && paths != self.seeds {
            return Err(invalid(
                "seeds agrees with ensemble.paths",
                "`seeds` and `ensemble.paths` disagree",
            ));
        }
        let dir = self.output.as_ref().and_then(|o| o.dir.as_ref());
        if dir.is_some() && self.out.is_some() && dir != self.out.as_ref() {
            return Err(invalid(
                "out agrees with output.dir",
                "`out` and `output.dir` disagree",
            ));
        }
        if let Some(a) = &self.analysis {
            if let Some(EpsilonSpec::Value(e)) = a.epsilon {
                if !e.is_finite() {
                    return Err(invalid("epsilon is finite", format!("epsilon = {e}")));
                }
            }
            for &c in a.c_values.iter().flatten() {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(invalid("C >= 0", format!("C = {c}")));
                }
            }
        }
        if let Some(PolicySpec::Power { exponent }) = self.policy {
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err(invalid(
                    "exponent > 0",
                    format!("policy exponent = {exponent}"),
                ));
            }
        }
        Ok(())
    }

    /// Applies command-line overrides; a flag replaces the matching config value.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(name) = o.example {
            if self.inline.is_some() {
                return Err(invalid(
                    "exactly one of example, inline",
                    "--example given for a config with an inline problem",
                ));
            }
            self.example = Some(name);
        }
        if o.dt.is_some() || o.steps.is_some() {
            let g = self.grid.get_or_insert_with(GridSpec::default);
            g.dt = o.dt.or(g.dt);
            g.steps = o.steps.or(g.steps);
        }
        if o.paths.is_some() || o.seed.is_some() {
            let e = self.ensemble.get_or_insert_with(EnsembleSpec::default);
            if o.paths.is_some() {
                e.paths = o.paths;
                self.seeds = None;
            }
            e.seed = o.seed.or(e.seed);
        }
        if let Some(eps) = o.epsilon {
            self.analysis
                .get_or_insert_with(AnalysisSpec::default)
                .epsilon = Some(eps);
        }
        if o.out.is_some() || o.format.is_some() {
            let out = self.output.get_or_insert_with(OutputSpec::default);
            if o.out.is_some() {
                out.dir = o.out.clone();
                self.out = None;
            }
            out.format = o.format.or(out.format);
        }
        self.check()
    }

    /// Builds the problem and fills every default into an explicit config.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        self.check()?;
        let policy_spec = self.policy.clone().unwrap_or(PolicySpec::Power {
            exponent: TRUNCATION_EXPONENT,
        });
        let PolicySpec::Power { exponent } = policy_spec;
        let policy = TruncationPolicy::power(exponent)?;

        let grid_spec = self.grid.clone().unwrap_or_default();
        let (problem, regime, dt, steps) = match (&self.example, &self.inline) {
            (Some(name), None) => {
                let e = build_example(*name)?;
                let dt = grid_spec.dt.unwrap_or(e.grid.dt);
                let steps = grid_spec.steps.unwrap_or(e.grid.n_steps);
                (e.problem, e.regime, dt, steps)
            }
            (None, Some(inline)) => {
                let delay = inline.delay.build()?;
                let regime = if delay.is_bounded() {
                    Regime::Bounded
                } else {
                    Regime::Unbounded
                };
                let history = InitialHistory::constant(inline.history.clone(), delay.tau())?;
                let coefficients = inline.coefficients.to_coefficient_set()?;
                let problem = SddeProblem::new(coefficients, delay, history)?;
                let dt = grid_spec.dt.unwrap_or(INLINE_DT);
                let steps = grid_spec.steps.unwrap_or(INLINE_STEPS);
                (problem, regime, dt, steps)
            }
            _ => unreachable!("checked above"),
        };
        let grid = SimulationGrid::new(dt, problem.tau(), steps)?;

        let ensemble = self.ensemble.clone().unwrap_or_default();
        let n_paths = ensemble.paths.or(self.seeds).unwrap_or(DEFAULT_SEEDS);
        let seed = ensemble.seed.unwrap_or(DEFAULT_SEED);

        let analysis = self.analysis.clone().unwrap_or_default();
        let c = problem.coefficients().constants();
        let eta = problem.delay().eta();
        let epsilon_spec = analysis
            .epsilon
            .unwrap_or(EpsilonSpec::Keyword(EpsilonKeyword::Midpoint));
        // A non-positive margin leaves the midpoint undefined; the run still proceeds.
        let epsilon = match epsilon_spec {
            EpsilonSpec::Value(e) => Some(e),
            EpsilonSpec::Keyword(EpsilonKeyword::Midpoint) => {
                window_midpoint(c.lambda1, c.lambda2, eta, regime).ok()
            }
        };
        let c_values = analysis.c_values.clone().unwrap_or_default();

        let output = self.output.clone().unwrap_or_default();
        let out_dir = output
            .dir
            .or_else(|| self.out.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        let format = output.format.unwrap_or(OutputFormat::Both);

        let config = RunConfig {
            schema: default_schema(),
            example: self.example,
            inline: self.inline.clone(),
            policy: Some(PolicySpec::Power { exponent }),
            grid: Some(GridSpec {
                dt: Some(dt),
                steps: Some(steps),
            }),
            ensemble: Some(EnsembleSpec {
                paths: Some(n_paths),
                seed: Some(seed),
            }),
            seeds: None,
            analysis: Some(AnalysisSpec {
                epsilon: Some(epsilon.map_or(epsilon_spec, EpsilonSpec::Value)),
                c_values: Some(c_values.clone()),
            }),
            out: None,
            output: Some(OutputSpec {
                dir: Some(out_dir.clone()),
                format: Some(format),
            }),
        };

        Ok(Resolved {
            config,
            problem,
            policy,
            grid,
            regime,
            n_paths,
            seed,
            epsilon,
            c_values,
            out_dir,
            format,
        })
    }
}

/// A config with every default filled in, plus the objects it describes.
#[derive(Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub problem: SddeProblem,
    pub policy: TruncationPolicy,
    pub grid: SimulationGrid,
    pub regime: Regime,
    pub n_paths: usize,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub c_values: Vec<f64>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}
