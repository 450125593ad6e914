//! Command-line front end: parameter sweeps, figure data, the
//! cross-validation suite and Monte Carlo runs.

pub mod app;
pub mod config;
pub mod error;
pub mod figures;
pub mod simulate;
pub mod svg;
pub mod sweep;
pub mod table;
pub mod validate;

pub use error::{CliError, Result};
