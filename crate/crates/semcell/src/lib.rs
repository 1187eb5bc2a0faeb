//! File formats, pipelines and the `semcell` command-line tool built on
//! [`semcell_core`].

pub mod catalog;
pub mod cli;
pub mod commands;
pub mod embeddings;
pub mod error;
pub mod fmt;
pub mod geojson;
pub mod manifest;
pub mod snapshot;
pub mod tables;
pub mod trace;

pub use error::{Error, Result};
