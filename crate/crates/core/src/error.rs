use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter record failed validation before any computation started.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The tridiagonal eigen solve behind a Gaussian rule did not converge.
    #[error("quadrature construction failed for n = {n}: {reason}")]
    QuadratureConstruction { n: usize, reason: String },

    /// A sum-of-exponentials parameter set produced no modes.
    #[error("sum-of-exponentials construction failed: {0}")]
    SoeConstruction(String),

    /// An iterative evaluation stopped short of its tolerance.
    #[error("no convergence: achieved {achieved:e}, wanted {wanted:e}")]
    NoConvergence { achieved: f64, wanted: f64 },

    /// A linear solve met a zero (or non-finite) pivot.
    #[error("singular pivot at row {0}")]
    SingularPivot(usize),

    /// Two objects that must agree in size or kind do not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A normalising quantity vanished.
    #[error("division by zero: {0}")]
    DivisionByZero(String),
}

pub type Result<T> = std::result::Result<T, Error>;
