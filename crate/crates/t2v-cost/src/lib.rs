//! File formats, bundled reference data and the command-line front end for
//! the text-to-video inference cost model in [`t2v_cost_core`].

pub mod bundled;
pub mod cli;
pub mod config;
pub mod emit;
mod error;
pub mod hardware;
pub mod ingest;
mod svg;

pub use error::{Error, Result};
pub use t2v_cost_core as core;
