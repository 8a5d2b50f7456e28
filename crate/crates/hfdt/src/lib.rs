//! Command-line tooling over `hfdt-core`: file formats, run configuration and
//! the `hfdt` subcommands.

pub mod cli;
pub mod config;
pub mod files;
pub mod report;

pub use cli::run;
