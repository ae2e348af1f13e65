use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid array configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid angular range: {0}")]
    InvalidRange(String),

    #[error("frequency {freq_hz} Hz outside band [{lo_hz}, {hi_hz}] Hz")]
    OutOfBand { freq_hz: f64, lo_hz: f64, hi_hz: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("singular linear system")]
    Singular,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(
        "SDP solver did not converge after {iterations} iterations \
         (primal {primal:e}, dual {dual:e}, gap {gap:e})"
    )]
    NotConverged {
        iterations: usize,
        primal: f64,
        dual: f64,
        gap: f64,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
