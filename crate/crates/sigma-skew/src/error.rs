use thiserror::Error;

#[derive(Debug, Error)]
pub enum SigmaError {
    #[error("invalid parameter: {name} {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("insufficient quadratic variation: requested horizon {requested}, attained {attained}")]
    InsufficientQuadraticVariation { requested: f64, attained: f64 },

    #[error("path does not vanish at 0 (initial value {value}, tolerance {tol})")]
    NonVanishingStart { value: f64, tol: f64 },

    #[error(
        "martingale part is not a standard Brownian motion \
         (terminal quadratic variation {attained} vs horizon {horizon}); use build_time_changed"
    )]
    NotBrownianDriver { attained: f64, horizon: f64 },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("misaligned inputs: {0}")]
    Misaligned(String),

    #[error("degenerate ensemble: {0}")]
    Degenerate(String),

    #[error("too few nonzero samples at t={t}: {count}")]
    TooFewSamples { t: f64, count: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
}

impl SigmaError {
    pub fn param(name: &str, reason: impl Into<String>) -> Self {
        SigmaError::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SigmaError>;
