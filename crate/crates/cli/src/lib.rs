//! Library side of the `kappa` binary: argument syntaxes, run configuration
//! and the subcommands.

pub mod app;
pub mod commands;
pub mod config;
pub mod parse;

pub use app::{run, Cli};
pub use commands::CliError;
