use std::fmt;

use thiserror::Error;

/// A single problem found while validating a dataset against a given context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The dataset's declared arity differs from the given context length.
    DatasetArity { expected: usize, found: usize },
    /// An occurrence has the wrong number of variables.
    OccurrenceArity {
        occurrence: usize,
        expected: usize,
        found: usize,
    },
    /// An occurrence carries an empty variable token.
    EmptyToken { occurrence: usize, position: usize },
    /// The given context carries an empty variable token.
    EmptyGivenToken { position: usize },
    /// An occurrence carries an empty outcome token.
    EmptyOutcome { occurrence: usize },
    /// More variables than the configured lattice capacity.
    Capacity { n: usize, max_vars: usize },
    /// The engine configuration itself is unusable.
    Config(String),
}

impl Violation {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Violation::Capacity { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DatasetArity { expected, found } => write!(
                f,
                "dataset arity {found} does not match given context length {expected}"
            ),
            Violation::OccurrenceArity {
                occurrence,
                expected,
                found,
            } => write!(
                f,
                "occurrence {} has {found} variables, expected {expected}",
                occurrence + 1
            ),
            Violation::EmptyToken {
                occurrence,
                position,
            } => write!(
                f,
                "occurrence {} has an empty token at variable {}",
                occurrence + 1,
                position + 1
            ),
            Violation::EmptyGivenToken { position } => {
                write!(f, "given context has an empty token at variable {}", position + 1)
            }
            Violation::EmptyOutcome { occurrence } => {
                write!(f, "occurrence {} has an empty outcome", occurrence + 1)
            }
            Violation::Capacity { n, max_vars } => write!(
                f,
                "{n} variables exceeds the lattice capacity of {max_vars}"
            ),
            Violation::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("validation failed: {}", join(.0))]
    Validation(Vec<Violation>),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("inconsistent input: {0}")]
    Consistency(String),
    #[error("no occurring homogeneous supracontext")]
    EmptyAnalogicalSet,
    #[error("distribution carries null-outcome mass")]
    NullMass,
    #[error("undefined quantity: {0}")]
    Undefined(String),
    /// `line` is 1-based; 0 means the input was not line-oriented.
    #[error("{}", located(*.line, .message))]
    Parse { line: usize, message: String },
}

impl Error {
    /// Splits a violation list into the error kind callers should see:
    /// capacity problems only surface when nothing else is wrong.
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        if !violations.is_empty() && violations.iter().all(Violation::is_capacity) {
            Error::Capacity(join(&violations))
        } else {
            Error::Validation(violations)
        }
    }
}

fn located(line: usize, message: &str) -> String {
    if line == 0 {
        message.to_owned()
    } else {
        format!("line {line}: {message}")
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
