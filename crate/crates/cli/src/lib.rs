//! Front end for the sortition experiments: scenario files, output tables and
//! the `run`/`sweep`/`replay` commands behind the `sortition` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_replay, cmd_run, cmd_sweep, Manifest, OutputBundle, RunMode};
pub use config::ScenarioFile;
