use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("threshold line diverges at v0 = 1/2")]
    PoleAtHalf,

    #[error("(v0 = {v0}, alpha = {alpha}) lies exactly on the threshold line")]
    ThresholdBoundary { v0: f64, alpha: f64 },

    #[error("no convergence: {message} (last bracket [{lo}, {hi}])")]
    Convergence { message: String, lo: f64, hi: f64 },

    #[error("tau pole: eta = {eta} is too close to 1")]
    PoleProximity { eta: Complex64 },

    #[error("internal domain violation: {0}")]
    InternalDomain(String),

    #[error("LU factorization broke down at column {column}")]
    SingularFactorization { column: usize },

    #[error("expected a position-space field")]
    WrongSpace,

    #[error("wrapped tails hold {fraction:.3e} of the norm; use a position span of at least {suggested_span:.6e}")]
    Aliasing { fraction: f64, suggested_span: f64 },

    #[error("no Borromean state just above alpha_c = {alpha_c}")]
    NoBorromeanState { alpha_c: f64 },

    #[error("fit needs at least {needed} points in the window, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
