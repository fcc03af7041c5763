//! Front end for the `squeeze` binary: sweeps, comparisons and checks built
//! on `squeeze-core`, with deterministic CSV and JSON output.

pub mod compare;
pub mod config;
pub mod error;
pub mod format;
pub mod oracle_check;
pub mod sweep;
pub mod validate;

pub use error::{CliError, CliResult};
