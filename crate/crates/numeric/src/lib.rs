//! Numerical evaluation of oscillatory integrals and local zeta functions at
//! desk scale (`n ≤ 2`), with fits of the leading exponent, log-power and
//! coefficient.

pub mod amplitude;
pub mod cutoff;
pub mod example2;
pub mod fit;
pub mod oscillatory;
pub mod quadrature;
pub mod zeta;

pub use amplitude::{parse_amplitude, AmplitudeExpr};
pub use cutoff::{CutoffConfig, CutoffShape};

#[derive(Debug, thiserror::Error)]
pub enum NumericError {
    #[error(transparent)]
    Core(#[from] oscindex_core::Error),
    #[error("numeric: dimension {0} is not supported (n <= 2)")]
    DimensionTooLarge(usize),
    #[error("numeric: tau = {tau} is outside the calibrated range [1, {limit}]")]
    TauOutOfRange { tau: f64, limit: f64 },
    #[error("numeric: fit needs at least {needed} usable samples, got {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("numeric: every sample is below the noise floor")]
    Vanishing,
    #[error("numeric: s = {s} is at or below the candidate pole {pole}")]
    BelowPole { s: f64, pole: f64 },
    #[error("numeric: {0}")]
    Invalid(String),
}

pub type NumericResult<T> = std::result::Result<T, NumericError>;
