//! File formats, configuration, Monte Carlo studies and the command line for
//! [`lmnet_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod study;

pub use error::{Error, Result};
