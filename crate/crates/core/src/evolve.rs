//! The crossover loop: each member of a unit pulls its closest chromosome
//! toward the mean of every chromosome in the unit.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::cell::{CellPopulation, Chromosome, CoexistenceUnit, ItemKey, SemanticCell};
use crate::config::EvolutionConfig;
use crate::error::{Error, Result};

/// One applied update, recorded when tracing is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<K> {
    /// Zero-based round index.
    pub round: usize,
    pub unit_id: usize,
    pub item: K,
    /// Index of the chromosome that moved.
    pub selected: usize,
    pub centroid: Chromosome,
    pub pre: Chromosome,
    pub post: Chromosome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvolveSummary {
    pub rounds: usize,
    pub units_per_round: usize,
    pub updates: usize,
}

/// Mean of all `|unit| * g` chromosomes of the unit's member cells.
pub fn unit_centroid<K: ItemKey>(
    unit: &CoexistenceUnit<K>,
    pop: &CellPopulation<K>,
) -> Result<Chromosome> {
    if unit.is_empty() {
        return Err(Error::EmptyUnit { unit: unit.id() });
    }
    let dim = pop.config().dim;
    let mut sum = alloc::vec![0.0; dim];
    let mut count = 0usize;
    for item in unit.members() {
        let cell = pop.get(item).ok_or_else(|| Error::UnknownMember {
            unit: unit.id(),
            item: item.to_string(),
        })?;
        for chromosome in cell.chromosomes() {
            for (acc, gene) in sum.iter_mut().zip(chromosome.genes()) {
                *acc += gene;
            }
            count += 1;
        }
    }
    let n = count as f64;
    for acc in &mut sum {
        *acc /= n;
    }
    Chromosome::new(sum).map_err(|_| Error::NonFinite {
        item: format!("<centroid of unit {}>", unit.id()),
    })
}

/// Index of the chromosome closest (Euclidean) to `centroid`; the lowest
/// index wins ties.
pub fn select_chromosome<K: ItemKey>(
    cell: &SemanticCell<K>,
    centroid: &Chromosome,
) -> Result<usize> {
    if cell.dim() != centroid.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("selecting in cell `{}`", cell.item()),
            expected: cell.dim(),
            found: centroid.dim(),
        });
    }
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (j, chromosome) in cell.chromosomes().iter().enumerate() {
        let d2 = chromosome.squared_distance(centroid);
        // Strict comparison keeps the earliest of equal distances.
        if d2 < best_d2 {
            best = j;
            best_d2 = d2;
        }
    }
    Ok(best)
}

/// Moves chromosome `selected` to `(1 - step) * old + step * centroid`,
/// leaving every other chromosome untouched.
///
/// On a non-finite result the cell is left unchanged and an error naming the
/// item is returned.
pub fn crossover_update<K: ItemKey>(
    cell: &mut SemanticCell<K>,
    selected: usize,
    centroid: &Chromosome,
    config: &EvolutionConfig,
) -> Result<()> {
    if selected >= cell.g() {
        return Err(Error::InvalidConfig(format!(
            "chromosome index {selected} out of range for cell `{}` with g = {}",
            cell.item(),
            cell.g()
        )));
    }
    if cell.dim() != centroid.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("updating cell `{}`", cell.item()),
            expected: cell.dim(),
            found: centroid.dim(),
        });
    }
    let old = &cell.chromosomes()[selected];
    let step = config.step(old.squared_distance(centroid));
    let keep = 1.0 - step;
    let next: Vec<f64> = old
        .genes()
        .iter()
        .zip(centroid.genes())
        .map(|(o, c)| keep * o + step * c)
        .collect();
    if next.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite {
            item: cell.item().to_string(),
        });
    }
    cell.chromosome_mut(selected)
        .genes_mut()
        .copy_from_slice(&next);
    Ok(())
}

/// Runs `config.rounds` passes over `units` in order.
///
/// Each unit's centroid is taken once, before any of its members move; the
/// members are then updated one after another in first-occurrence order.
/// Pass `Some(trace)` to record every update.
pub fn evolve<K: ItemKey>(
    pop: &mut CellPopulation<K>,
    units: &[CoexistenceUnit<K>],
    mut trace: Option<&mut Vec<TraceEntry<K>>>,
) -> Result<EvolveSummary> {
    let config = pop.config().clone();
    config.validate()?;
    let mut summary = EvolveSummary {
        rounds: config.rounds,
        units_per_round: units.len(),
        updates: 0,
    };
    for round in 0..config.rounds {
        for unit in units {
            let centroid = unit_centroid(unit, pop)?;
            for item in unit.members() {
                let cell = pop.get_mut(item).ok_or_else(|| Error::UnknownMember {
                    unit: unit.id(),
                    item: item.to_string(),
                })?;
                let selected = select_chromosome(cell, &centroid)?;
                let pre = trace.as_ref().map(|_| cell.chromosomes()[selected].clone());
                crossover_update(cell, selected, &centroid, &config).map_err(|e| match e {
                    Error::NonFinite { item } => Error::NonFinite {
                        item: format!("{item} (unit {})", unit.id()),
                    },
                    other => other,
                })?;
                summary.updates += 1;
                if let (Some(sink), Some(pre)) = (trace.as_deref_mut(), pre) {
                    sink.push(TraceEntry {
                        round,
                        unit_id: unit.id(),
                        item: item.clone(),
                        selected,
                        centroid: centroid.clone(),
                        pre,
                        post: cell.chromosomes()[selected].clone(),
                    });
                }
            }
        }
    }
    Ok(summary)
}
