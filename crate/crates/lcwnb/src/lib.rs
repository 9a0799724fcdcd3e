//! File formats, preprocessing, the evaluation harness and the `lcwnb`
//! command-line tool, built on [`lcwnb_core`].

pub mod arff;
pub mod cli;
pub mod csv_input;
mod error;
pub mod formats;
pub mod harness;
pub mod preprocess;
pub mod raw;
pub mod report;

pub use error::{Error, Result};
pub use lcwnb_core as core;
