use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] catstate::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Machine-readable failure report written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorReport<'a> {
    pub kind: &'static str,
    pub exit_code: u8,
    pub scenario: Option<&'a str>,
    pub message: String,
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Bad inputs map to 2, failures inside the computation to 3.
    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "config" => 2,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        use catstate::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Model(E::InvalidParameter(_) | E::Parse(_) | E::Json(_) | E::DimensionMismatch(..)) => "config",
            CliError::Model(E::Io(_)) | CliError::Io { .. } => "io",
            CliError::Model(_) => "numerical",
        }
    }

    pub fn report<'a>(&self, scenario: Option<&'a str>) -> ErrorReport<'a> {
        ErrorReport {
            kind: self.kind(),
            exit_code: self.exit_code(),
            scenario,
            message: self.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
