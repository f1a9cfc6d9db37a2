use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GkpError {
    /// A matrix that must be invertible is singular or has the wrong shape.
    #[error("rank error: {0}")]
    Rank(String),
    /// A basis whose symplectic Gram matrix is not integral.
    #[error("not a valid GKP lattice: {0}")]
    InvalidLattice(String),
    /// A theta-type series whose quadratic form is not positive definite.
    #[error("divergent series: {0}")]
    Divergence(String),
    /// The requested case is outside the implemented regime.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An input failed validation (non-symplectic matrix, bad parameter, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// An affine channel that cannot be inverted.
    #[error("non-invertible channel: {0}")]
    NonInvertible(String),
    /// A truncation or quadrature that did not reach the requested accuracy.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    /// A sampler whose acceptance rate collapsed.
    #[error("pathological state: {0}")]
    Pathological(String),
}

impl GkpError {
    /// True for errors caused by numerical convergence rather than invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            GkpError::NonConvergence(_) | GkpError::Divergence(_) | GkpError::Pathological(_)
        )
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GkpError>;
