//! File formats, a parallel search driver and the `rankineq` command line,
//! on top of [`rankineq_core`].

pub mod cli;
mod error;
pub mod formats;
pub mod parallel;

pub use error::{Error, Result};
