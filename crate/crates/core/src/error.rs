use thiserror::Error;

/// Errors raised by the geometric and operator-level routines.
///
/// Quantities are reported as `f64` regardless of the working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("overlap onto the zero-dimensional subspace is undefined")]
    UndefinedOverlap,
    #[error("subspace does not cover the target (overlap {mu:e})")]
    NoCover { mu: f64 },
    #[error("operator does not commute with the target projector (residual {residual:e})")]
    NotAnAgsp { residual: f64 },
    #[error("operator is not a dilation on the target (margin {margin})")]
    NotADilation { margin: f64 },
    #[error("spectral gap {gap:e} above the target is degenerate")]
    DegenerateGap { gap: f64 },
    #[error("input vector has norm {norm}, expected a unit vector")]
    Normalization { norm: f64 },
    #[error("vector lies at distance {distance:e} from the subspace")]
    Membership { distance: f64 },
    #[error("ambient dimension {ambient} too small for a subspace of dimension {dim}")]
    AmbientTooSmall { ambient: usize, dim: usize },
    #[error("ambiguous ground-space clustering; eigenvalues near the cluster edge: {near_edge:?}")]
    AmbiguousClustering { near_edge: Vec<f64> },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
