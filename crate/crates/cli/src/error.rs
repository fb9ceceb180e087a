use thiserror::Error;

use crate::parser::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] bargmann_core::Error),
}

impl CliError {
    /// Machine-readable prefix of the single-line error report.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse(e) => e.code(),
            CliError::Config(_) => "E_CONFIG",
            CliError::Io(_) => "E_IO",
            CliError::Core(e) => e.code(),
        }
    }

    /// `CODE: message` on one line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("{}: {msg}", self.code())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
