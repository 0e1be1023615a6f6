use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input fell outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tension mode `{0}` is not supported by this operation")]
    UnsupportedMode(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("alignment error: {0}")]
    Alignment(String),

    /// Invalid configuration value, with the dotted path of the offending field.
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Fails with a domain error unless `value` is finite and satisfies `ok`.
pub(crate) fn check(value: f64, ok: bool, what: &str, requirement: &str) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be {requirement} (got {value})")))
    }
}

pub(crate) fn check_positive(value: f64, what: &str) -> Result<()> {
    check(value, value > 0.0, what, "positive")
}

pub(crate) fn check_non_negative(value: f64, what: &str) -> Result<()> {
    check(value, value >= 0.0, what, "non-negative")
}
