use thiserror::Error;

/// Errors raised by measure construction, transport solvers and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of {0} samples is too small (need at least 4)")]
    GridTooSmall(usize),

    #[error("frequency cutoff {k} aliases on a grid of {m} samples")]
    Aliasing { k: usize, m: usize },

    #[error("density sample {value} at index {index} is negative")]
    NegativeDensity { index: usize, value: f64 },

    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("signed input where a nonnegative measure is required")]
    SignedInput,

    #[error("total masses differ: {0} vs {1}")]
    MassMismatch(f64, f64),

    #[error("exponent p = {0} must be finite and >= 1")]
    InvalidExponent(f64),

    #[error("function has nonzero mean {0}")]
    NonzeroMean(f64),

    #[error("location {0} lies outside [0, 1)")]
    LocationOutOfRange(f64),

    #[error("weight {0} must be positive and finite")]
    InvalidWeight(f64),

    #[error("empty input")]
    Empty,

    #[error("{what}: size {size} exceeds the cap of {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("series is not Hermitian at frequency {0}")]
    NotHermitian(usize),

    #[error("function vanishes identically")]
    ZeroFunction,

    #[error("spectrum has a nonzero coefficient at |k| = {0}, below the band edge {1}")]
    BandViolation(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of an iterative numerical procedure, as opposed to
    /// rejected input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NoConvergence(_) | Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}
