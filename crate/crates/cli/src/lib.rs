//! Scenario-driven batch runner for the `qgraph` library.

pub mod commands;
pub mod error;
pub mod format;
pub mod scenario;
pub mod svg;

pub use commands::{run, star_files, verify, Options, Report};
pub use error::{CliError, Result};
