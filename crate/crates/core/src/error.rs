use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, MterError>;

/// Everything that can go wrong inside the library.
///
/// All variants describe invalid input or an input the numerics cannot
/// handle; none of them are I/O errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MterError {
    #[error("length error: {0}")]
    Length(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("invalid sample count {samples}: must be a power of two and at least {min}")]
    Samples { samples: usize, min: usize },

    #[error("mask is zero where a nonzero symbol is required")]
    ZeroMask,

    #[error("even symbol has zero even part; mask is not even-reversible")]
    ZeroEvenPart,

    #[error("even symbol vanishes near z = {at}: |alpha_ev(z)| = {modulus:e} is below the guard threshold")]
    NotEvenReversible { at: Complex64, modulus: f64 },

    #[error("decimation is singular: |alpha_ev| = {modulus:e} at the {index}-th of {size} roots of unity")]
    DecimationSingular {
        index: usize,
        size: usize,
        modulus: f64,
    },

    #[error("spectral inversion did not converge to tol {tol:e} with up to {max_size} samples")]
    DecayTooSlow { tol: f64, max_size: usize },

    #[error("decay certificate unavailable: {0}")]
    CertificateUnavailable(String),

    #[error("level error: signal length {len} does not support {levels} decomposition levels")]
    Level { len: usize, levels: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("format error: {0}")]
    Format(String),
}
