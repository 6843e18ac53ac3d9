//! File formats, configuration and subcommands of the `dlsm` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;

pub use error::{CliError, CliResult};
