use std::path::PathBuf;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const COMPUTATION: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}: {path}: {message}")]
    Schema {
        file: String,
        path: String,
        message: String,
    },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    /// Core rejected a scenario value before any sweep ran.
    #[error("invalid scenario: {context}: {source}")]
    InvalidValue { context: String, source: cvqkd_core::Error },
    #[error("{context}: {source}")]
    Compute { context: String, source: cvqkd_core::Error },
    #[error("malformed CSV: {0}")]
    Csv(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute { .. } => exit::COMPUTATION,
            _ => exit::VALIDATION,
        }
    }

    pub(crate) fn compute(context: impl Into<String>) -> impl FnOnce(cvqkd_core::Error) -> Self {
        let context = context.into();
        move |source| CliError::Compute { context, source }
    }

    pub(crate) fn invalid(context: impl Into<String>) -> impl FnOnce(cvqkd_core::Error) -> Self {
        let context = context.into();
        move |source| CliError::InvalidValue { context, source }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
