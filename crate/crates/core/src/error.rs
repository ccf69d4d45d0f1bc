use thiserror::Error;

/// Errors raised by the algebra, map, monad and state layers.
///
/// Display strings lead with the variant name so that front ends can report
/// the violated condition verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NotSquare: matrix is {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("NotHermitian: asymmetry {asymmetry:e} exceeds tolerance")]
    NotHermitian { asymmetry: f64 },
    #[error("NoConvergence: Jacobi sweeps exhausted with off-diagonal norm {off_diagonal:e}")]
    NoConvergence { off_diagonal: f64 },
    #[error("NotPSD: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("NonFinite: matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("SingularSystem: pivot {pivot:e} below threshold")]
    SingularSystem { pivot: f64 },

    #[error("InvalidSignature: {0}")]
    InvalidSignature(String),
    #[error("SignatureMismatch: expected {expected:?}, found {found:?}")]
    SignatureMismatch { expected: Vec<usize>, found: Vec<usize> },
    #[error("NotSelfAdjoint: ||x - x*|| = {asymmetry:e}")]
    NotSelfAdjoint { asymmetry: f64 },
    #[error("NotEffect: element is not between 0 and 1")]
    NotEffect,

    #[error("DomainNotSingleBlock: domain signature {0:?}")]
    DomainNotSingleBlock(Vec<usize>),
    #[error("InvalidDimension: {0}")]
    InvalidDimension(String),
    #[error("NotPU: {0}")]
    NotPu(String),
    #[error("NotMIU: {0}")]
    NotMiu(String),
    #[error("NotFunctional: row {row} does not have exactly one entry equal to 1")]
    NotFunctional { row: usize },
    #[error("NotCommutative: signature {0:?}")]
    NotCommutative(Vec<usize>),

    #[error("IndexOutOfRange: index {index} with size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("SizeMismatch: {0}")]
    SizeMismatch(String),
    #[error("InvalidDist: {0}")]
    InvalidDist(String),
    #[error("NotStochastic: {0}")]
    NotStochastic(String),

    #[error("InvalidState: {0}")]
    InvalidState(String),
    #[error("NotEModHom: {0}")]
    NotEModHom(String),
    #[error("InconsistentAffineData: residual {residual:e}")]
    InconsistentAffineData { residual: f64 },
    #[error("DimensionTooLarge: dimension {dim} exceeds {max}")]
    DimensionTooLarge { dim: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
