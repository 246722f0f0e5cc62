//! Error types shared by every module.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by constructors, protocols, and solvers.
///
/// Numeric witnesses are reported as `f64` regardless of the working scalar
/// so that the error type stays object-safe and serializable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state vector has (near-)zero norm")]
    InvalidState,

    #[error("invalid dimension {0}: expected at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate triple: states {0} and {1} coincide as rays")]
    DegenerateTriple(usize, usize),

    #[error("phase system is not square: {states} states over {dim} basis elements")]
    InvalidShape { states: usize, dim: usize },

    #[error("the designated basis states are not linearly independent")]
    NotABasis,

    #[error("states are not linearly independent (min/max singular value ratio {0:.3e})")]
    NotIndependent(f64),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("infeasible: remainder has min eigenvalue {witness:.6e}")]
    Infeasible { witness: f64 },

    #[error("target is not an element of the shared ensemble: {0}")]
    NotInEnsemble(String),

    #[error("target amplitudes are not real (max |Im| = {0:.3e})")]
    NotRealAmplitude(f64),

    #[error("unsupported dimension {0}: {1}")]
    UnsupportedDimension(usize, String),

    #[error("invalid config: {0}")]
    ConfigError(String),

    #[error("empty data: at least one count is required")]
    EmptyData,
}
