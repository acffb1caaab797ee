use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("the zero polynomial has empty support")]
    EmptySupport,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The Sturm chain lost a remainder to round-off; the count cannot be trusted.
    #[error("unreliable real-root count: {0}")]
    UnreliableCount(String),

    #[error("simultaneous root iteration did not converge ({} of {} roots converged)",
        .converged.iter().filter(|c| **c).count(), .converged.len())]
    RootFindingFailure {
        partial: Vec<Complex64>,
        converged: Vec<bool>,
    },

    #[error("unreliable solve: {failed} of {tracked} paths failed")]
    UnreliableSolve { failed: usize, tracked: usize },

    #[error("ambiguous real classification: imaginary part {imag:e} inside the ambiguity band")]
    AmbiguousClassification { imag: f64 },

    #[error("degenerate fiber: {0}")]
    DegenerateFiber(String),

    #[error("degenerate support: convex hull has dimension {dim} < {ambient}")]
    DegenerateSupport { dim: usize, ambient: usize },

    #[error("curve sampling failed: {0}")]
    SamplingFailure(String),

    #[error("invalid run: {discarded} of {total} trials discarded (cap {cap})")]
    InvalidRun {
        discarded: usize,
        total: usize,
        cap: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}
