//! Command-line experiments for stationary Fokker-Planck learning.
//!
//! Configuration resolution, the cost-expression language used by
//! `custom-cost`, and the experiment runners shared by the binary and the
//! acceptance suite.

pub mod config;
pub mod experiments;
pub mod expr;

pub use config::{Experiment, ExperimentConfig, RawConfig};
pub use experiments::{describe, run_experiment, CliError, Outcome};
