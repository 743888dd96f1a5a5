//! File formats, configuration and workflows behind the `avq` command.
//!
//! The numerical pipeline lives in [`avq_core`]; this crate adds manifest
//! and model files, CSV/JSON outputs, atomic writes and per-clip
//! parallelism.

pub mod error;
pub mod fsutil;
pub mod manifest;
pub mod model_file;
pub mod pipeline;
pub mod report;
pub mod settings;
pub mod tables;

pub use error::{CliError, CliResult};
