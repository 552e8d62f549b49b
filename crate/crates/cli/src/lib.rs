//! Command-line layer: configuration, commands and table output.

pub mod commands;
pub mod config;
pub mod table;

pub use commands::{run, CliError, Command};
pub use config::ExperimentConfig;
pub use table::ResultTable;
