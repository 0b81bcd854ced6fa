use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("index {value} out of range (bound {bound})")]
    Range { value: usize, bound: usize },

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("not Hermitian: |m[{row}][{col}] - conj(m[{col}][{row}])| = {residual:e}")]
    NotHermitian { row: usize, col: usize, residual: f64 },

    #[error(
        "invalid curvature tensor: symmetry residual {residual:e} at index ({}, {}, {}, {})",
        index[0], index[1], index[2], index[3]
    )]
    InvalidTensor { index: [usize; 4], residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource cap exceeded: {needed} entries requested, cap is {cap}")]
    Resource { needed: u128, cap: u128 },
}

impl Error {
    pub(crate) fn invalid(msg: &str) -> Self {
        Error::InvalidArgument(String::from(msg))
    }
}
