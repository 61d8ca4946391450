//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mass squared must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid boundary marking: {0}")]
    InvalidMarking(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("identification is not a subgraph isomorphism: {0}")]
    IdentificationMismatch(String),
    #[error("boundary markings overlap")]
    OverlappingMarkings,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular (pivot {pivot:e} below threshold)")]
    SingularMatrix { pivot: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix has a negative entry")]
    NegativeEntry,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("insertion at boundary vertex `{0}`")]
    InsertionOnBoundary(String),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("boundary data do not match: {0}")]
    BoundaryMismatch(String),
    #[error("perturbative order {requested} exceeds cap {cap}")]
    OrderTooLarge { requested: u32, cap: u32 },
    #[error("potential violates the growth condition: {0}")]
    PotentialUnbounded(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("tensor quadrature dimension {dim} exceeds limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("unsupported shape or boundary condition: {0}")]
    UnsupportedShape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// True for failures caused by floating-point breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. } | Error::NotPositiveDefinite | Error::NotSymmetric
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
