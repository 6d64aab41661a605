use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix order {0} is odd; the hafnian needs an even order")]
    OddOrder(usize),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("index {index} out of range for order {order} (indices are 1-based)")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("nonzero diagonal entry at position {0}")]
    NonzeroDiagonal(usize),
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("template parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("order {order} exceeds the enumeration limit {limit}")]
    TooLarge { order: usize, limit: usize },
    #[error("hypothesis violated: k = {k} is odd and n = 2k = {n}")]
    Hypothesis { n: u64, k: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
