use thiserror::Error;

/// Errors produced by the estimation and bounds machinery.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An approximation was requested outside its validity regime.
    #[error("outside approximation regime: {0}")]
    Regime(String),

    /// The evaluation grid does not capture enough probability mass.
    #[error("grid too narrow: estimated mass outside grid {outside_mass:.3e} exceeds 1e-6")]
    GridCoverage { outside_mass: f64 },

    /// Adaptive quadrature hit its depth limit before reaching the requested
    /// tolerance. The partial estimate and its error estimate are carried so
    /// callers can decide whether the result is still usable.
    #[error("quadrature did not converge: partial estimate {partial:.6e}, error estimate {abs_error:.3e}")]
    Quadrature { partial: f64, abs_error: f64 },

    /// A summation or enumeration was requested for a problem size where the
    /// exhaustive route is no longer practical.
    #[error("exhaustive computation infeasible: {0}")]
    Exhaustive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
