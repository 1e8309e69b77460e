use thiserror::Error;

/// Error type shared by every solver and evaluator in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A root finder was handed an interval without a sign change.
    #[error("no sign change in bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    /// An iteration failed to reach its tolerance.
    #[error("{what} did not converge within {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    /// Derivative requested exactly at a jump of a discontinuous trajectory.
    #[error("derivative query at a discontinuity (t = {t})")]
    Discontinuity { t: f64 },

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not meet its tolerance budget.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// A quantity that must stay away from zero crossed it.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Regression over too few or degenerate points.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Otto cycle parameters that no engine can realize.
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    /// Trajectory parameters or samples that violate the model assumptions.
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
}

pub type Result<T> = std::result::Result<T, Error>;
