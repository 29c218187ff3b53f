use thiserror::Error;

/// Errors raised across the crate.
///
/// Invalid RDQ data is *not* an error on its own (see [`crate::character::check_rdq`]);
/// it only becomes one when an operation that requires a valid triplet is called.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("unsupported dimension n = {0} (operation requires n = 1)")]
    UnsupportedDimension(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidLattice(_) => "invalid_lattice",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::Precondition(_) => "precondition",
            Error::Truncation(_) => "truncation",
            Error::Range(_) => "range",
            Error::Resource(_) => "resource",
            Error::Numeric(_) => "numeric",
            Error::Consistency(_) => "consistency",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
