//! Experiment harness for the qsteg simulator: JSON configs, parallel
//! deterministic Monte Carlo runs, JSON reports and CSV figure data.

pub mod config;
pub mod error;
pub mod experiment;
pub mod figure;
pub mod report;

pub use config::{Experiment, ExperimentConfig, SCHEMA_VERSION};
pub use error::{HarnessError, Result};
pub use experiment::run_experiment;
pub use figure::{emit_figure_data, Figure};
pub use report::RunReport;
