use alloc::format;
use alloc::vec::Vec;

use crate::cell::{CellPopulation, Chromosome, ItemKey, SemanticCell};
use crate::config::{EvolutionConfig, InitMode};
use crate::error::{Error, Result};
use crate::rng::{hash_display, KeyedStream, DOMAIN_JITTER};

/// Expands one base vector per item into a cell of `g` chromosomes.
///
/// In jitter mode chromosome `j` of item `w` is `base + delta`, each
/// component of `delta` uniform in `[-jitter_scale, jitter_scale)` and drawn
/// from a stream keyed by `(seed, w, j)`.
pub fn initialize_cells<'a, K, I>(
    base_vectors: I,
    config: &EvolutionConfig,
) -> Result<CellPopulation<K>>
where
    K: ItemKey + 'a,
    I: IntoIterator<Item = (&'a K, &'a [f64])>,
{
    config.validate()?;
    let mut pop = CellPopulation::new(config.clone());
    for (item, base) in base_vectors {
        if base.len() != config.dim {
            return Err(Error::DimensionMismatch {
                context: format!("base vector of `{item}`"),
                expected: config.dim,
                found: base.len(),
            });
        }
        let jitter = config.init_mode == InitMode::Jitter && config.jitter_scale > 0.0;
        let item_hash = hash_display(item);
        let mut chromosomes = Vec::with_capacity(config.g);
        for j in 0..config.g {
            let genes: Vec<f64> = if jitter {
                let mut stream = KeyedStream::new(config.seed, DOMAIN_JITTER, item_hash, j as u64);
                base.iter()
                    .map(|b| b + stream.symmetric(config.jitter_scale))
                    .collect()
            } else {
                base.to_vec()
            };
            let chromosome = Chromosome::new(genes).map_err(|_| Error::NonFinite {
                item: format!("{item}"),
            })?;
            chromosomes.push(chromosome);
        }
        pop.insert(SemanticCell::new(item.clone(), chromosomes)?)?;
    }
    Ok(pop)
}
