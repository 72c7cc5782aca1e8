use thiserror::Error;

/// Errors produced by scheme construction, integration, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("invalid scheme table: {0}")]
    InvalidScheme(String),

    #[error("step count s = {s} outside supported range {min}..={max}")]
    StepCount { s: usize, min: usize, max: usize },

    #[error("linear solve failed: residual {residual:.3e} after {iterations} iterations")]
    LinearSolve { residual: f64, iterations: usize },

    #[error("fixed-point correction failed: update {update:.3e} after {iterations} iterations")]
    FixedPoint { update: f64, iterations: usize },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value detected: {0}")]
    NonFinite(String),
}
