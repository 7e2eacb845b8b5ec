use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A distribution parameter lies outside its domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally valid input that cannot be used (empty histogram, bad lengths).
    #[error("invalid data: {0}")]
    Data(String),

    /// Moment estimators need the sample variance to exceed the sample mean.
    #[error("sample variance {variance} does not exceed sample mean {mean}; data are not overdispersed")]
    Overdispersion { mean: f64, variance: f64 },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("no admissible power-spectrum candidate")]
    NoAdmissibleCandidate,

    /// The requested family/method combination is not available.
    #[error("unsupported: {0}")]
    Unsupported(String),
}
