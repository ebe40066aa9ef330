use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the Gamma function at {0}")]
    Pole(Complex64),

    #[error("polygamma order {0} is not supported (orders 1 and 2 only)")]
    UnsupportedOrder(u32),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("root finding failed: {0}")]
    NoRoot(String),

    #[error("quadrature check failed: {0}")]
    Quadrature(String),

    #[error("invalid contour: {0}")]
    Contour(String),

    #[error("truncation check failed: {0}")]
    Truncation(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
