use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("no real factorization-surface point: radicand {radicand} < 0")]
    NoFactorizationPoint { radicand: f64 },

    #[error("chain size {0} must be even")]
    OddSize(usize),

    #[error("chain size {n} outside supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },

    #[error("site {site} out of range for a chain of {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unphysical correlators: two-site operator has eigenvalue {min_eig:e}")]
    Unphysical { min_eig: f64 },

    #[error("invalid bath specification: {0}")]
    InvalidBath(String),

    #[error(
        "numerical integrity failure at t = {t}: trace error {trace_err:e}, \
         min eigenvalue {min_eig:e} (try a smaller dt)"
    )]
    Integrity {
        t: f64,
        trace_err: f64,
        min_eig: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// integrity failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Integrity { .. } | Error::Unphysical { .. } => 3,
            Error::Io(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}
