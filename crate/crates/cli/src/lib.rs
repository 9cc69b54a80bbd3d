//! Experiment runner for `semcom-core`: config files, parameter grids and
//! CSV output.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{exit, CliError};
