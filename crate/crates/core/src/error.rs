use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {asymmetry:e}")]
    NonHermitianInput {
        row: usize,
        col: usize,
        asymmetry: f64,
    },

    #[error(
        "Jacobi eigensolver did not converge in {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("shifted tridiagonal matrix is numerically singular at lambda = {lambda} (|det| = {det:e} <= guard {guard:e})")]
    SingularShift { lambda: f64, det: f64, guard: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("no ring partner within tolerance {tol:e} for chain eigenvalue {lambda}")]
    MatchFailure { lambda: f64, tol: f64 },

    #[error("determinant magnitude {magnitude:e} exceeds 1e280; reduce the number of cells")]
    OverflowRisk { magnitude: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("eigenvector basis is not orthonormal (max Gram deviation {deviation:e})")]
    NonOrthogonalBasis { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error reflects bad input (as opposed to a numerical
    /// failure on valid input).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::InvalidParameters(_)
                | Error::InvalidModel(_)
                | Error::ShapeMismatch(_)
        )
    }
}
