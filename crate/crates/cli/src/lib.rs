//! Command-line front end: state generators, JSON state files and reports.
//!
//! Every subcommand is a plain function in [`commands`] so the binary and
//! the tests share one code path.

pub mod commands;
pub mod error;
pub mod format;
pub mod report;

pub use commands::{GenKind, Settings};
pub use error::{exit, CliError};
pub use format::{Lossless, StateFile};
pub use report::{BipartiteReport, Report};
