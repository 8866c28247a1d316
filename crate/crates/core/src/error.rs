use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Block partition or divisibility requirement violated.
    #[error("structural error: {0}")]
    Structure(String),

    /// Input outside the documented domain.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Input for which the operation is undefined (zero matrix, zero target norm).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A factorization or linear solve could not be carried out.
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// An iterative solver failed to produce a certified solution.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Experiment configuration rejected; names the offending field.
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for errors raised by configuration or input validation, as
    /// opposed to numerical failures.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Config { .. }
            | Error::Validation(_)
            | Error::Structure(_)
            | Error::Dimension(_)
            | Error::Json(_) => true,
            Error::Trial { source, .. } => source.is_validation(),
            _ => false,
        }
    }

    /// True for numerical solver failures.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Degenerate(_) | Error::LinearSolve(_) | Error::Solver(_) => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
