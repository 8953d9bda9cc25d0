use thiserror::Error;

/// Errors surfaced by the simulation engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integration or root-finding routine failed.
    #[error("numeric failure at t = {time:e} s: {message}")]
    Numeric { time: f64, message: String },

    /// A configuration document could not be accepted.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// A trajectory inside an ensemble failed.
    #[error("trajectory {index} failed: {source}")]
    Trajectory {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(time: f64, msg: impl Into<String>) -> Self {
        Error::Numeric {
            time,
            message: msg.into(),
        }
    }

    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Numeric { .. } => true,
            Error::Trajectory { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
