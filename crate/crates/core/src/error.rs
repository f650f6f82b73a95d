use thiserror::Error;

use crate::linalg::SubspaceBasis;

/// Errors produced by the library.
///
/// `Unknown` outcomes of the decision procedures are values, not errors; an
/// error means the input violated a precondition or a numeric routine broke.
#[derive(Debug, Error)]
pub enum CsrError {
    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty family")]
    EmptyFamily,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("product enumeration would exceed the cap of {cap} products")]
    ProductCapExceeded { cap: usize },

    #[error("no positive semidefinite eigenvector found within the search budget")]
    NoPsdEigenvector { kernel: SubspaceBasis },

    #[error("eigenvalue one has a {dim}-dimensional eigenspace; expected a simple Perron root")]
    PerronInconsistent { dim: usize },

    #[error("entries must be integers")]
    NotIntegral,

    #[error("generator {index} is not Metzler (negative off-diagonal entry)")]
    NotMetzler { index: usize },

    #[error("linear part of operator {index} is not a contraction (spectral radius {radius})")]
    NotContractive { index: usize, radius: f64 },

    #[error("fixed points violate the gluing condition B0 v1 = B1 v0")]
    CrossCondition,

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CsrError> = std::result::Result<T, E>;
