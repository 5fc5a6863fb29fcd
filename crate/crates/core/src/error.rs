use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("qubit count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("unsupported formula order {0} for this operation")]
    UnsupportedOrder(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Trotter number search exceeded cap {0}")]
    CapExceeded(u32),
    #[error("numerical failure: {0}")]
    Numerical(String),
}
