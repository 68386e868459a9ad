use std::fmt;

use mtem_core::MtemError;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    UnknownKey {
        key: String,
        line: usize,
        column: usize,
    },
    /// Well-formed JSON whose values do not fit the config schema.
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    Invalid {
        invariant: String,
        message: String,
    },
    Core(MtemError),
    Io {
        path: String,
        message: String,
    },
    Usage(String),
}

impl CliError {
    pub fn from_json(e: serde_json::Error) -> Self {
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Data => {
                if let Some(rest) = message.strip_prefix("unknown field `") {
                    let key = rest.split('`').next().unwrap_or_default().to_string();
                    CliError::UnknownKey { key, line, column }
                } else {
                    CliError::Schema {
                        line,
                        column,
                        message,
                    }
                }
            }
            _ => CliError::Syntax {
                line,
                column,
                message,
            },
        }
    }

    pub fn io(path: impl fmt::Display, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            message: e.to_string(),
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> Value {
        let body = match self {
            CliError::Syntax {
                line,
                column,
                message,
            } => json!({
                "kind": "syntax", "line": line, "column": column, "message": message,
            }),
            CliError::UnknownKey { key, line, column } => json!({
                "kind": "unknown key", "key": key, "line": line, "column": column,
                "message": self.to_string(),
            }),
            CliError::Schema {
                line,
                column,
                message,
            } => json!({
                "kind": "schema", "line": line, "column": column, "message": message,
            }),
            CliError::Invalid { invariant, message } => json!({
                "kind": "constraint violation", "invariant": invariant, "message": message,
            }),
            CliError::Core(e) => core_record(e),
            CliError::Io { path, message } => json!({
                "kind": "io", "path": path, "message": message,
            }),
            CliError::Usage(message) => json!({ "kind": "usage", "message": message }),
        };
        json!({ "error": body })
    }
}

fn core_record(e: &MtemError) -> Value {
    let mut v = json!({ "kind": core_kind(e), "message": e.to_string() });
    match e {
        MtemError::GridNotAdmissible { suggestions, .. } => v["suggestions"] = json!(suggestions),
        MtemError::EnsembleOverflow { failures } => v["failures"] = json!(failures),
        MtemError::StateOverflow { step } => v["step"] = json!(step),
        _ => {}
    }
    v
}

fn core_kind(e: &MtemError) -> &'static str {
    match e {
        MtemError::GridNotAdmissible { .. } => "grid not admissible",
        MtemError::MarginNonPositive { .. } => "stability margin non-positive",
        MtemError::EpsilonOutsideWindow { .. } => "epsilon outside window",
        MtemError::StateOverflow { .. } | MtemError::EnsembleOverflow { .. } => "state overflow",
        MtemError::NegativeDelay { .. } => "negative delay",
        MtemError::UnknownExample(_) => "unknown example",
        MtemError::InvalidArgument(_) => "invalid argument",
        _ => "model error",
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Syntax { message, .. } | CliError::Schema { message, .. } => {
                write!(f, "config: {message}")
            }
            CliError::UnknownKey { key, line, column } => {
                write!(
                    f,
                    "config: unknown key `{key}` at line {line} column {column}"
                )
            }
            CliError::Invalid { invariant, message } => {
                write!(f, "config violates `{invariant}`: {message}")
            }
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<MtemError> for CliError {
    fn from(e: MtemError) -> Self {
        CliError::Core(e)
    }
}
