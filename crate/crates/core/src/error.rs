use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds tolerance)")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("all eigenvalues are below the support tolerance")]
    ZeroMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("probability distribution is degenerate: {0}")]
    DegenerateDistribution(String),
    #[error("vector system is not overcomplete (resolution residual {residual:.3e})")]
    NotOvercomplete { residual: f64 },
    #[error("not a Gram matrix of unit vectors: {0}")]
    NotAGramMatrix(String),
    #[error("invalid orthogonal resolution: {0}")]
    InvalidResolution(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("Kraus operators are not trace preserving (residual {residual:.3e})")]
    NotCptp { residual: f64 },
    #[error("support of the state is not contained in the support of the reference state")]
    SupportViolation,
    #[error("parameter t = {0} must lie in (0, 1) and grids must decrease strictly")]
    InvalidT(f64),
    #[error("family is not orthogonal: |<phi_{i}|phi_{j}>| = {overlap:.3e}")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },
    #[error("family does not span the input space (rank {rank} < {dim})")]
    NotComplete { rank: usize, dim: usize },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}
