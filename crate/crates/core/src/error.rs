use std::fmt;

use thiserror::Error;

/// A single violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model regime violated: {0}")]
    Regime(String),

    #[error(
        "risk threshold {epsilon} unattainable up to T = {ceiling} s (best risk {best_risk:e} at T = {best_period} s)"
    )]
    Infeasible {
        epsilon: f64,
        ceiling: f64,
        best_risk: f64,
        best_period: f64,
    },

    #[error("simulation runaway in trial {trial} (seed {seed}): exceeded {limit} s of simulated time")]
    Runaway { trial: u64, seed: u64, limit: f64 },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
