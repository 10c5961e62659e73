//! Batch harness around `gaugeforge-core`: configuration, the `GFLD` field
//! format, reports and the five subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod gfld;
pub mod report;

pub use config::RunConfig;
pub use error::{CliError, Result};
