//! Configuration files, subcommands and output for the `omech` binary.

pub mod check;
pub mod commands;
pub mod config;

pub use commands::{CliError, Destination};
pub use config::{parse_config, ConfigError, Format, RunConfig};
