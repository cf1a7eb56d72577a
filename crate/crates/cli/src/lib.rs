//! Declarative experiment runner for geophase-core: one JSON config, one
//! CSV table.

pub mod config;
pub mod run;
pub mod table;

pub use config::{parse_config, ConfigErrors, ExperimentConfig, Kind};
pub use run::{run, RunError, RunOptions};
pub use table::{parse_csv, ResultTable};
