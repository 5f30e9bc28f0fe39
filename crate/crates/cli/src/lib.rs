//! Batch experiment driver for `expgap-core`.
//!
//! An [`ExperimentConfig`] names one command and its parameters;
//! [`run_experiment`] turns it into a [`Report`] by calling the core
//! library, and [`emit_report`] writes that report as CSV or JSON.

mod config;
mod error;
mod experiments;
mod report;

pub use config::{Command, ConfigFile, ExperimentConfig, Format, Params};
pub use error::{CliError, EXIT_FAILURE, EXIT_PROMISE_VIOLATED, EXIT_USAGE};
pub use experiments::{run_experiment, Outcome, Status};
pub use report::{emit_report, format_float, render, Cell, Report};
