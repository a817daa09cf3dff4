//! Command-line front end for `capwave`.

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod validate;

pub use error::CliError;
