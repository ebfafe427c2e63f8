use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of the called operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The requested object is too large to realize.
    #[error("resource limit: {what} needs dimension {required}, cap is {cap}")]
    Resource {
        what: String,
        required: usize,
        cap: usize,
    },

    #[error("iterative eigensolver did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    NonConvergence { iterations: usize, best_residual: f64 },

    /// Malformed input file.
    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
