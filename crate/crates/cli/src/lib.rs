//! Experiment runner: configures runs, writes their artifacts, compares runs and exports
//! plot-ready tables.

pub mod artifacts;
pub mod commands;
pub mod config;

pub use commands::{cmd_compare, cmd_run, cmd_scatter, cmd_simulate, CompareReport, ScatterReport};
pub use config::{ConfigError, ExperimentConfig, ObjectiveKind, Overrides};
