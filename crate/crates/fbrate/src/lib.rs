//! Command line, sweeps, output formats and multi-threaded Monte-Carlo for
//! the effective rate of Fluctuating Beckmann fading channels.
//!
//! The numerical work lives in [`fbrate_core`].

pub mod cli;
pub mod error;
pub mod format;
pub mod parallel;
pub mod sweep;
pub mod validate;

pub use error::{CliError, ExitCode};
