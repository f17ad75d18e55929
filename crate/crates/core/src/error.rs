use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    /// The pair violates `0 <= theta < b + 1`.
    #[error("(b, theta) = ({b}, {theta}) is not certifiable: theta must lie in [0, b + 1)")]
    NotCertifiable { b: f64, theta: f64 },

    #[error("scenario error at `{field}`: {message}")]
    Scenario { field: String, message: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn scenario(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.into(),
            message: message.into(),
        }
    }
}
