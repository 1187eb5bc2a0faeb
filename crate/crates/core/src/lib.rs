//! Semantic cells.
//!
//! Every item (a word, a map region, ...) owns a cell of `g` chromosome
//! vectors, each a candidate sense. Items observed together form a
//! co-existence unit; for every unit, each member moves its chromosome
//! closest to the unit centroid a step toward that centroid. Items seen in
//! many different contexts end up with chromosomes spread apart, which
//! [`diversity`] measures as the summed per-dimension variance.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, catalog
//! parsing and the command-line tool live in the `semcell` crate.
#![no_std]

extern crate alloc;

pub mod cell;
pub mod config;
pub mod diversity;
pub mod error;
pub mod evolve;
pub mod geo;
pub mod hindcast;
pub mod init;
pub mod rng;
pub mod text;

pub use cell::{
    validate_item_id, CellPopulation, Chromosome, CoexistenceUnit, ItemKey, SemanticCell,
};
pub use config::{DistanceMode, EvolutionConfig, InitMode, TieBreak};
pub use diversity::{diversity, rank_by_diversity, rank_values, smooth_scores, DiversityRecord};
pub use error::{Error, Result};
pub use evolve::{
    crossover_update, evolve, select_chromosome, unit_centroid, EvolveSummary, TraceEntry,
};
pub use init::initialize_cells;
