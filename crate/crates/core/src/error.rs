use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input.
    #[error("input error: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A bounded search (bisection, subdivision, ε-search) ran out of resolution.
    #[error("resolution exceeded: {0}")]
    ResolutionExceeded(String),

    /// No chart of the model certifies the image of a simplex.
    #[error("chart cover error: {0}")]
    ChartCover(String),

    /// A compact sample is not absorbed by any step; carries the escaping point.
    #[error("absorption failure: point {witness} escapes every step")]
    AbsorptionFailure { witness: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn resolution(msg: impl Into<String>) -> Self {
        Error::ResolutionExceeded(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
