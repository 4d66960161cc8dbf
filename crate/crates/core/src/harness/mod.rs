//! Experiment runner: configs in, reports out.

pub mod cli;
pub mod config;
pub mod render;
pub mod run;

pub use config::{Evaluate, EvaluateMode, ExperimentConfig, PredictorConfig, Scenario};
pub use render::{render_report, ReportFormat};
pub use run::{run_experiment, ReportRow, RunReport};
