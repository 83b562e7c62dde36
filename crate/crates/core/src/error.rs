use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid subspace: N={n_dots}, 2J={j2} ({reason})")]
    InvalidSubspace { n_dots: u32, j2: i32, reason: &'static str },

    #[error("subspace mismatch: {0}")]
    SubspaceMismatch(String),

    #[error("index out of range: {0}")]
    InvalidIndex(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported number of dots: {0} (only 2 and 3 are driven)")]
    UnsupportedDots(u32),

    #[error("integration failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
