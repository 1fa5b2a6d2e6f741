use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A setup or scan parameter violates its invariant. `field` is a dotted path.
    #[error("invalid value for {field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("placement undefined for N={0}")]
    UnsupportedOrder(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Brute-force evaluation refused for matrices larger than the oracle guard.
    #[error("naive evaluation refused for N={0} (limit 8)")]
    OracleTooLarge(usize),

    #[error(
        "quadrature did not converge{}: coarse {coarse}, fine {fine}, estimated error {error:.3e} > {tolerance:.1e}",
        context.map(|(i, j)| format!(" for entry ({i}, {j})")).unwrap_or_default()
    )]
    Convergence {
        coarse: Complex64,
        fine: Complex64,
        error: f64,
        tolerance: f64,
        context: Option<(usize, usize)>,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Attach the amplitude-matrix cell to a convergence failure.
    pub fn with_cell(self, detector: usize, emitter: usize) -> Self {
        match self {
            Error::Convergence {
                coarse,
                fine,
                error,
                tolerance,
                ..
            } => Error::Convergence {
                coarse,
                fine,
                error,
                tolerance,
                context: Some((detector, emitter)),
            },
            other => other,
        }
    }
}
