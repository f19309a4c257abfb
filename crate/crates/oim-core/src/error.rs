use thiserror::Error;

/// Errors produced by solver, model, and emulation operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("problem file syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("problem file edge {position} ({i}, {j}): {message}")]
    InvalidEdge {
        position: usize,
        i: usize,
        j: usize,
        message: String,
    },

    #[error("non-finite phase produced at t = {t} (step size too large or bad inputs)")]
    NonFinite { t: f64 },

    #[error("coupling ({i}, {j}) = {value} is positive; hardware mode only realizes antiferromagnetic couplings")]
    SignConstraint { i: usize, j: usize, value: f64 },

    #[error("{n} spins exceeds the exhaustive-search limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("code {code} out of range [{min}, {max}] for this quantizer")]
    CodeOutOfRange { code: u16, min: u16, max: u16 },
}

pub type Result<T> = std::result::Result<T, Error>;
