use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ensemble of {n} TLSs exceeds the subset-enumeration cap of {cap}; use the Monte-Carlo estimators instead")]
    EnsembleTooLarge { n: usize, cap: usize },

    #[error("closed form outside its validity regime: {0}")]
    Regime(String),

    #[error("quadrature did not converge: estimate {value:e}, achieved error {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("inversion failed: {0}")]
    Inversion(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status: 2 for bad input, 3 for resource caps, 4 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) | Error::Json(_) => 2,
            Error::EnsembleTooLarge { .. } | Error::ResourceCap(_) => 3,
            Error::Regime(_) | Error::Quadrature { .. } | Error::Inversion(_) | Error::Factorization(_) => 4,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
