use thiserror::Error;

/// Errors produced anywhere in the optimizer.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The problem evaluator rejected a decision vector.
    #[error("evaluation failed for {decision:?}: {message}")]
    Evaluation { decision: Vec<f64>, message: String },
    /// An operation was attempted on an island or ensemble in the wrong state.
    #[error("state error: {0}")]
    State(String),
    /// A run or campaign configuration is invalid.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
