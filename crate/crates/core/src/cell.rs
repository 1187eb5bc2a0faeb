//! The data model: chromosomes, semantic cells, co-existence units and populations.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::config::EvolutionConfig;
use crate::error::{Error, Result};

/// Anything usable as an item identity: a word, a mesh region, ...
///
/// Ordering fixes the observable iteration order of a population; the
/// `Display` form is what ends up in files and what keys random streams.
pub trait ItemKey: Ord + Clone + fmt::Display + fmt::Debug {}

impl<T: Ord + Clone + fmt::Display + fmt::Debug> ItemKey for T {}

/// Rejects ids that would break the line/tab oriented file formats.
pub fn validate_item_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains(['\t', '\n', '\r']) {
        return Err(Error::InvalidItemId(id.to_string()));
    }
    Ok(())
}

/// One candidate sense of an item: a `d`-dimensional vector of finite genes.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome(Vec<f64>);

impl Chromosome {
    pub fn new(genes: Vec<f64>) -> Result<Self> {
        if genes.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                item: String::from("<chromosome>"),
            });
        }
        Ok(Chromosome(genes))
    }

    pub fn zeros(dim: usize) -> Self {
        Chromosome(alloc::vec![0.0; dim])
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_genes(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn squared_distance(&self, other: &Chromosome) -> f64 {
        squared_distance(&self.0, &other.0)
    }

    pub fn distance(&self, other: &Chromosome) -> f64 {
        libm::sqrt(self.squared_distance(other))
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// The container assigned to one item: its id plus `g` chromosomes whose
/// indices are stable for the lifetime of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticCell<K> {
    item: K,
    chromosomes: Vec<Chromosome>,
}

impl<K: ItemKey> SemanticCell<K> {
    /// Builds a cell, checking that all chromosomes share one dimension.
    pub fn new(item: K, chromosomes: Vec<Chromosome>) -> Result<Self> {
        if chromosomes.is_empty() {
            return Err(Error::InvalidConfig(alloc::format!(
                "cell `{item}` has no chromosomes"
            )));
        }
        let dim = chromosomes[0].dim();
        if let Some(bad) = chromosomes.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                context: alloc::format!("cell `{item}`"),
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(SemanticCell { item, chromosomes })
    }

    pub fn item(&self) -> &K {
        &self.item
    }

    pub fn chromosomes(&self) -> &[Chromosome] {
        &self.chromosomes
    }

    pub fn g(&self) -> usize {
        self.chromosomes.len()
    }

    pub fn dim(&self) -> usize {
        self.chromosomes[0].dim()
    }

    pub(crate) fn chromosome_mut(&mut self, j: usize) -> &mut Chromosome {
        &mut self.chromosomes[j]
    }
}

/// An ordered set of distinct items observed together: a sentence, a window of events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoexistenceUnit<K> {
    id: usize,
    members: Vec<K>,
}

impl<K: ItemKey> CoexistenceUnit<K> {
    /// Collapses repeated occurrences, keeping first-occurrence order.
    pub fn from_occurrences<I: IntoIterator<Item = K>>(id: usize, occurrences: I) -> Self {
        let mut members: Vec<K> = Vec::new();
        for item in occurrences {
            if !members.contains(&item) {
                members.push(item);
            }
        }
        CoexistenceUnit { id, members }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn members(&self) -> &[K] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All cells of a run, keyed and iterated in ascending item order.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPopulation<K> {
    cells: BTreeMap<K, SemanticCell<K>>,
    config: EvolutionConfig,
}

impl<K: ItemKey> CellPopulation<K> {
    pub fn new(config: EvolutionConfig) -> Self {
        CellPopulation {
            cells: BTreeMap::new(),
            config,
        }
    }

    /// Inserts a cell whose shape must match the configured `g` and `d`.
    /// Replaces any previous cell for the same item.
    pub fn insert(&mut self, cell: SemanticCell<K>) -> Result<()> {
        if cell.g() != self.config.g {
            return Err(Error::InvalidConfig(alloc::format!(
                "cell `{}` has {} chromosomes, population requires g = {}",
                cell.item(),
                cell.g(),
                self.config.g
            )));
        }
        if cell.dim() != self.config.dim {
            return Err(Error::DimensionMismatch {
                context: alloc::format!("cell `{}`", cell.item()),
                expected: self.config.dim,
                found: cell.dim(),
            });
        }
        self.cells.insert(cell.item().clone(), cell);
        Ok(())
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn get(&self, item: &K) -> Option<&SemanticCell<K>> {
        self.cells.get(item)
    }

    pub(crate) fn get_mut(&mut self, item: &K) -> Option<&mut SemanticCell<K>> {
        self.cells.get_mut(item)
    }

    pub fn contains(&self, item: &K) -> bool {
        self.cells.contains_key(item)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SemanticCell<K>> {
        self.cells.values()
    }

    pub fn items(&self) -> impl Iterator<Item = &K> {
        self.cells.keys()
    }
}
