use std::fmt::Display;
use std::path::Path;

use serde_json::json;
use thiserror::Error;

/// A failure that ends the command. The variant picks the exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable input: formulas, documents, configs.
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Verification(String),
    /// No backend configured, or the backend could not be reached.
    #[error("{0}")]
    Backend(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn parse(context: impl Display, e: impl Display) -> CliError {
        CliError::Parse(format!("{context}: {e}"))
    }

    pub fn read(path: &Path, e: impl Display) -> CliError {
        CliError::Io(format!("cannot read {}: {e}", path.display()))
    }

    pub fn write(path: &Path, e: impl Display) -> CliError {
        CliError::Io(format!("cannot write {}: {e}", path.display()))
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Backend(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Verification(_) => "verification",
            CliError::Backend(_) => "backend",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "code": self.code(), "message": self.to_string() } }).to_string()
    }
}
