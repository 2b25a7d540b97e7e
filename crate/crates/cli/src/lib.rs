//! Scenario configuration, execution and report output for the `dho` tool.

pub mod catalog;
pub mod config;
pub mod error;
pub mod expr;
pub mod runner;

pub use config::{parse_scenario, Scenario};
pub use error::CliError;
pub use runner::{execute, ScenarioOutputs};
