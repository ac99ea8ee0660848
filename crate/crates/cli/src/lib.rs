//! Config parsing, bundled figure presets and the run engine behind the
//! `topochain` binary.

pub mod config;
pub mod presets;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, Violation};
pub use run::{execute, run_to_dir, RunManifest, RunOptions};
