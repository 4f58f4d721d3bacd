//! File formats, JSON artifacts and the command-line pipeline around
//! [`wtpc_core`].
//!
//! Every step reads and writes plain files: delimited SCADA tables in,
//! JSON model artifacts and plot-ready CSV tables out. See [`cli`] for the
//! subcommands.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use error::{AppError, AppResult};
