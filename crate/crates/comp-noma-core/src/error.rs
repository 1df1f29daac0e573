//! Error types shared by scenario construction and the solvers.

use alloc::string::String;
use core::fmt;

/// A scenario configuration field failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Name of the offending configuration key.
    pub field: &'static str,
    /// What is wrong with it.
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.reason)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

/// A solver run failed in a way that cannot be reported as an ordinary
/// (infeasible) result.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    /// An internal invariant was violated (e.g. the origin is not in the
    /// normal set before a boundary projection).
    Invariant(String),
    /// An iterate became non-finite.
    Diverged { context: String, iteration: usize },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Invariant(msg) => write!(f, "solver invariant violated: {msg}"),
            SolverError::Diverged { context, iteration } => {
                write!(f, "solver diverged in {context} at iteration {iteration}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolverError {}
