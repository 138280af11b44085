use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular basis: |det| = {det:e}")]
    SingularBasis { det: f64 },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("unsupported basis: {0}")]
    UnsupportedBasis(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid alignment mismatch: {0}")]
    Alignment(String),

    #[error("invalid exponent {0}: exponents must lie in (0, inf]")]
    InvalidExponent(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("mollification diverged: ratio bounds [{lo:e}, {hi:e}] outside [1e-6, 1e6]")]
    MollificationDiverged { lo: f64, hi: f64 },

    #[error("differentiation order {order} too high: amplification {amplification:e} exceeds 1e12")]
    OrderTooHigh { order: usize, amplification: f64 },

    #[error("undefined fit: {0}")]
    UndefinedFit(String),

    #[error("symbol cannot be converted: {0}")]
    NonDecayingSymbol(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("memory guard: {entries} entries exceed the limit of {limit}")]
    MemoryGuard { entries: usize, limit: usize },

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
