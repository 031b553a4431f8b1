//! File formats, pipelines and harnesses behind the `subregion` command.

pub mod bench;
pub mod config;
pub mod error;
pub mod eval;
pub mod oracle;
pub mod persist;
pub mod pgm;
pub mod pipeline;
pub mod records;
pub mod synthetic;

pub use config::{Layer, Settings};
pub use error::{CliError, CliResult};
pub use persist::{IndexFile, IndexHeader};
