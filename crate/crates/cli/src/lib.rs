//! Batch front end for `cascade-discord`: config files, sweeps, critical
//! temperatures and calibration, written as CSV plus a JSON run manifest.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
mod error;
pub mod format;
pub mod run;

pub use args::run_cli;
pub use config::{parse_config, parse_config_text, Command, Overrides, RunConfig, THREADS_ENV};
pub use error::CliError;
pub use run::{run, Outcome, MANIFEST};
