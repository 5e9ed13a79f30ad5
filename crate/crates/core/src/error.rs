use thiserror::Error;

/// Errors raised by spec construction, evaluation and the estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid spec: {0}")]
    Spec(String),

    #[error("tolerance error: {0}")]
    Tolerance(String),

    #[error("overflow guard: {0}")]
    OverflowGuard(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::Spec(msg.into())
    }

    pub(crate) fn schedule(msg: impl Into<String>) -> Self {
        Error::Schedule(msg.into())
    }

    /// Short machine-readable tag, used in suite reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Spec(_) => "SpecError",
            Error::Tolerance(_) => "ToleranceError",
            Error::OverflowGuard(_) => "OverflowGuardError",
            Error::Schedule(_) => "ScheduleError",
            Error::Parse(_) => "ParseError",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
