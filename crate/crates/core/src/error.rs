use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus tau = {0} must satisfy Im(tau) >= {1}")]
    InvalidModulus(Complex64, f64),

    #[error("theta tail bound {bound:e} at cutoff {trunc_k} exceeds tolerance {tol:e}")]
    TruncationTooShort { trunc_k: usize, bound: f64, tol: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what} = {value} lies within {distance:.3e} of the period lattice (minimum {min:.3e})")]
    PoleProximity {
        what: &'static str,
        value: Complex64,
        distance: f64,
        min: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("word of length {0} exceeds the quadratic truncation")]
    WordTooLong(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("invalid relation indices: {0}")]
    InvalidIndices(String),

    #[error("prefactor {0:.3e} too close to zero")]
    PrefactorNearZero(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parameter sampling failed after {0} rejections")]
    SamplingFailed(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
