//! Error type shared by the solvers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape radius is not positive at theta = {theta}")]
    NonPositiveShape { theta: f64 },

    #[error("second derivative is singular at the endpoint theta = {0}")]
    SingularEndpoint(f64),

    #[error("endpoint exponent {0} <= -1: integral diverges")]
    DivergentIntegrand(f64),

    #[error("degenerate corner parameters: {0}")]
    DegenerateCorner(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("nonlinear solve stalled after {iterations} iterations (max residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("continuation failed past lambda = {last_good} (target {target})")]
    ContinuationFailed { last_good: f64, target: f64 },

    #[error("no converged sample in the angle search")]
    AllSamplesFailed,
}

pub type Result<T> = std::result::Result<T, Error>;
