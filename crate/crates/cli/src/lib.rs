//! Front end of `qthermo`: scenario files, CSV tables, SVG plots and
//! figure presets.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod presets;
pub mod table;

pub use config::ScenarioConfig;
pub use error::{CliError, CliResult};
