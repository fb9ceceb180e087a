//! Command-line harness: symbol parsing, experiment configuration, dispatch and
//! report emission.

pub mod config;
pub mod error;
pub mod parser;
pub mod report;
pub mod run;

pub use config::{Cli, ExperimentConfig};
pub use error::CliError;
pub use report::{emit_report, Report};
pub use run::run_experiment;
