//! Error taxonomy. Failed *checks* are results, not errors; this type is
//! reserved for inputs or computations that cannot produce a verdict at all.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A coupling-family or model parameter is outside its admissible range
    /// (for example a non-summable decay exponent).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An iterative evaluation could not reach the requested tolerance
    /// within its iteration cap.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The requested Hilbert-space dimension exceeds the dense-solver cap.
    #[error("dimension {dim} exceeds the dense diagonalization cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// A run configuration is structurally invalid or violates a
    /// precondition of the requested operation.
    #[error("configuration error: {0}")]
    Config(String),

    /// A quantity is not defined for the requested inputs (for example an
    /// infinite-volume integral that diverges in the requested dimension).
    #[error("domain error: {0}")]
    Domain(String),

    /// The couplings make a required denominator vanish (for example
    /// ε(k) = 0 at some nonzero momentum).
    #[error("degenerate couplings: {0}")]
    DegenerateCouplings(String),

    /// The dense eigensolver failed to converge.
    #[error("eigensolver failure: {0}")]
    Eigen(String),
}
