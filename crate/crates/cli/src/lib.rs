//! Scenario runner for the collision-model precursor analysis.
//!
//! A scenario is a TOML file (see the repository README for the schema).
//! [`run_file`] resolves it, simulates both trajectories, and writes the CSV
//! artifacts plus a `manifest.toml` echoing the fully resolved scenario.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{CvBlock, DvBlock, MetricName, Model, ScenarioConfig};
pub use error::{CliError, Result};
pub use run::{run_config, run_file, simulate, Manifest, RunOptions, THREADS_ENV};
