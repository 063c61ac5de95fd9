//! Configuration, orchestration and output for the `darboux` binary.

pub mod app;
pub mod config;
pub mod demos;
pub mod error;
pub mod output;
pub mod run;

pub use error::CliError;
