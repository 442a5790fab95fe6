use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error("inconsistent sensing model: {0}")]
    InconsistentSensing(String),

    #[error("inconsistent Kalman update: zero prior and zero noise variance with mismatched measurement")]
    KalmanInconsistent,

    #[error("non-finite integrand value {value} at gain {gain}")]
    NonFiniteIntegrand { gain: f64, value: f64 },

    #[error("unbounded power problem: zero linear price, concave objective and infinite cap")]
    Unbounded,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
