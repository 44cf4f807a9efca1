use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are coarse categories; the CLI prints the category as the
/// leading word of its error line.
#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the operation's domain (non-finite value, bad dimension, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A geometric fit could not be produced.
    #[error("fit error: {0}")]
    Fit(String),
    /// Invalid configuration.
    #[error("config error: {0}")]
    Config(String),
    /// The request is well formed but refused (too large, single class, ...).
    #[error("refused: {0}")]
    Refused(String),
    /// Malformed persisted data.
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// The message without its category prefix.
    pub fn detail(&self) -> String {
        match self {
            Error::Domain(m) | Error::Fit(m) | Error::Config(m) | Error::Refused(m) | Error::Format(m) => m.clone(),
            Error::Io(e) => e.to_string(),
        }
    }

    /// Short category label used on CLI error lines.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Fit(_) => "fit",
            Error::Config(_) => "config",
            Error::Refused(_) => "refused",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be finite, got {x}")))
    }
}
