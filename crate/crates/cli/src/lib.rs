//! Command-line front end: graph sources, the label file format, reports and
//! the `build` / `query` / `bench` / `verify` commands.

pub mod commands;
mod error;
pub mod labelfile;
pub mod report;
pub mod source;

pub use error::CliError;
