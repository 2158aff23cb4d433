//! Experiment runner for `modeloss-core`: config resolution, CSV, SVG and
//! the subcommands behind the `modeloss` binary.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod kv;
pub mod parallel;
pub mod svg;
pub mod verify;

pub use error::{CliError, Result};
