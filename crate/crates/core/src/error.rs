use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid points are not strictly increasing at index {index}")]
    NonIncreasingPoints { index: usize },

    #[error("a time scale needs at least 3 points, got {count}")]
    TooFewPoints { count: usize },

    #[error("bad time scale parameter: {0}")]
    BadFamilyParam(String),

    #[error("index {index} is the last grid point and has no forward jump")]
    OutOfKappa { index: usize },

    #[error("index {index} out of range for a grid of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("grid functions are defined on different time scales or have incompatible lengths")]
    GridMismatch,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("not regressive at t = {t} (index {index}): 1 + mu*g = {value:e}")]
    NotRegressive { index: usize, t: f64, value: f64 },

    #[error("y(t)*y(sigma(t)) vanishes at t = {t} (index {index})")]
    ZeroDenominator { index: usize, t: f64 },

    #[error("Wronskian vanishes at t = {t} (index {index})")]
    SingularWronskian { index: usize, t: f64 },

    #[error(
        "basis function does not solve the homogeneous equation: residual {residual:e} at t = {t} (index {index})"
    )]
    NotHomogeneousSolution { index: usize, t: f64, residual: f64 },

    #[error("coefficients p and q are not constant; use the variable-coefficient bound")]
    NonConstantCoefficients,

    #[error("characteristic roots coincide (alpha^2 = beta)")]
    DegenerateRoots,

    #[error("characteristic roots are complex (alpha^2 < beta)")]
    ComplexRoots,

    #[error("beta must be nonzero")]
    ZeroBeta,

    #[error("invalid bound parameter: {0}")]
    InvalidBound(String),

    #[error("sequence window does not cover t = {t}")]
    OutsideWindow { t: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;
