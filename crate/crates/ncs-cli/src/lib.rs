//! Experiment harness around `ncs-core`: configuration files and flag
//! overrides, seeded multi-run execution with CSV/JSON persistence,
//! statistics reports over result files, and SVG trajectory plots.

pub mod config;
pub mod plot;
pub mod report;
pub mod runner;

pub use config::{parse_config, Algorithm, ExperimentConfig, PartialConfig, ProblemSelection};
pub use plot::emit_trajectory_svg;
pub use runner::run_experiment;
