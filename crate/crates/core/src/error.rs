use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested tolerance could not be met; `lo..hi` is the best bracket reached.
    #[error("precision exhausted: best bracket [{lo:e}, {hi:e}]")]
    PrecisionExhausted { lo: f64, hi: f64 },

    #[error("tail bound insufficient: certified tail {bound:e} exceeds budget {budget:e}")]
    TailInsufficient { bound: f64, budget: f64 },

    #[error("horizon exceeded: square side {side:e} below materialized resolution {horizon:e}")]
    HorizonExceeded { side: f64, horizon: f64 },

    #[error("boundary set has positive length")]
    PositiveMeasureSet,

    #[error("boundary set covers the whole circle")]
    FullCircle,

    #[error("zero {index} lies outside the declared Stolz angle")]
    NotStolz { index: usize },

    #[error("finite zero set: the radial test needs infinitely many zeros")]
    FiniteZeroSet,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("radius search exhausted on arc {arc}")]
    RadiusSearchExhausted { arc: usize },

    #[error("curve exhausted after {placed} zeros")]
    CurveExhausted { placed: usize },

    /// Malformed input text; `line` and `column` are 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
