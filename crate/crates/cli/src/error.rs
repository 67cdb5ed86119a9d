use std::path::PathBuf;

use thiserror::Error;

/// Exit codes follow the BSD `sysexits` numbering above the verdict codes.
pub mod exit {
    pub const DECOMPOSABLE: u8 = 0;
    pub const NOT_DECOMPOSABLE: u8 = 1;
    pub const INDETERMINATE: u8 = 2;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const NO_INPUT: u8 = 66;
    pub const SOFTWARE: u8 = 70;
    pub const IO: u8 = 74;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Input { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("{context}: malformed state file: {source}")]
    Parse { context: String, source: serde_json::Error },
    #[error("{context}: {source}")]
    Data { context: String, source: trischmidt_core::Error },
}

impl CliError {
    pub fn data(context: impl Into<String>, source: trischmidt_core::Error) -> Self {
        CliError::Data { context: context.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Input { .. } => exit::NO_INPUT,
            CliError::Output(_) => exit::IO,
            CliError::Parse { .. } => exit::DATA,
            CliError::Data { source: trischmidt_core::Error::NoConvergence { .. }, .. } => exit::SOFTWARE,
            CliError::Data { .. } => exit::DATA,
        }
    }
}
