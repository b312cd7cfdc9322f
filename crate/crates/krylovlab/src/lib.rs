//! Experiment orchestration for `krylovlab-core`: configuration files, RMT
//! and ANNI sweeps, the scrambling probe and CSV output.

pub mod config;
pub mod experiments;
pub mod output;
pub mod selftest;
pub mod stats;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiments::{run, Outcome, RunError};
