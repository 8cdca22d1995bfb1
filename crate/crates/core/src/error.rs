use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request would exceed an explicit storage or enumeration budget.
    #[error("capacity exceeded: {what} needs {requested}, budget is {budget}")]
    Capacity {
        what: &'static str,
        requested: u64,
        budget: u64,
    },

    /// A numeric routine failed to reach its accuracy target.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Malformed or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Domain(msg.into()))
}
