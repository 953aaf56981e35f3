//! Library surface of the `loopsim` binary: configuration loading, run
//! manifests and the command implementations.

pub mod commands;
pub mod config;
pub mod manifest;

pub use commands::{cmd_compare, cmd_resume, cmd_run};
pub use config::RunConfig;
pub use manifest::RunManifest;
