//! File formats, configuration and parallel drivers around `mesokey-core`.

pub mod analysis;
pub mod config;
pub mod entropy;
pub mod error;
pub mod keyfile;
pub mod parallel;
pub mod table;
pub mod transcript;

pub use error::{CliError, CliResult};
