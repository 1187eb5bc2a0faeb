//! Per-item sense diversity, rankings and rank-window smoothing.

use alloc::vec::Vec;

use crate::cell::{CellPopulation, ItemKey, SemanticCell};

/// Nominal look-ahead of [`smooth_scores`]: a window spans this many items
/// after the current one.
pub const DEFAULT_SMOOTHING_WINDOW: usize = 100;

/// Sum over dimensions of the population variance (divisor `g`) of the
/// cell's chromosomes. Zero for `g = 1` and for identical chromosomes.
pub fn diversity<K: ItemKey>(cell: &SemanticCell<K>) -> f64 {
    let dim = cell.dim();
    let mut mean = alloc::vec![0.0; dim];
    let mut m2 = alloc::vec![0.0; dim];
    // Welford's update, one pass over the chromosomes.
    for (n, chromosome) in cell.chromosomes().iter().enumerate() {
        let count = (n + 1) as f64;
        for ((mu, acc), &x) in mean.iter_mut().zip(m2.iter_mut()).zip(chromosome.genes()) {
            let delta = x - *mu;
            *mu += delta / count;
            *acc += delta * (x - *mu);
        }
    }
    let g = cell.g() as f64;
    m2.iter().map(|acc| acc / g).sum::<f64>().max(0.0)
}

/// One row of a diversity ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityRecord<K> {
    pub item: K,
    pub div: f64,
    /// 1-based.
    pub rank: usize,
}

/// Sorts `(item, div)` pairs by descending div, ties by ascending item, and
/// assigns ranks `1..=N`.
pub fn rank_values<K: ItemKey, I: IntoIterator<Item = (K, f64)>>(
    values: I,
) -> Vec<DiversityRecord<K>> {
    let mut rows: Vec<(K, f64)> = values.into_iter().collect();
    rows.sort_by(|(ia, da), (ib, db)| db.total_cmp(da).then_with(|| ia.cmp(ib)));
    rows.into_iter()
        .enumerate()
        .map(|(i, (item, div))| DiversityRecord {
            item,
            div,
            rank: i + 1,
        })
        .collect()
}

pub fn rank_by_diversity<K: ItemKey>(pop: &CellPopulation<K>) -> Vec<DiversityRecord<K>> {
    rank_values(pop.iter().map(|c| (c.item().clone(), diversity(c))))
}

/// Forward-looking window mean: `out[i]` averages `labels[i..=i + window]`,
/// truncated at the end of the list. The default window of 100 therefore
/// spans 101 items wherever the tail allows.
pub fn smooth_scores(labels: &[bool], window: usize) -> Vec<f64> {
    let n = labels.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0usize);
    for &l in labels {
        prefix.push(prefix.last().copied().unwrap_or(0) + usize::from(l));
    }
    (0..n)
        .map(|i| {
            let end = (i + window).min(n - 1) + 1;
            (prefix[end] - prefix[i]) as f64 / (end - i) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::Chromosome;
    use alloc::vec;

    fn cell(cs: &[&[f64]]) -> SemanticCell<&'static str> {
        SemanticCell::new(
            "w",
            cs.iter()
                .map(|c| Chromosome::new(c.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn diversity_examples() {
        // Dimension 1: ((0-1)^2 + (2-1)^2) / 2 = 1; dimension 2: 0.
        assert_eq!(diversity(&cell(&[&[0.0, 0.0], &[2.0, 0.0]])), 1.0);
        assert_eq!(
            diversity(&cell(&[&[0.7, -1.3], &[0.7, -1.3], &[0.7, -1.3]])),
            0.0
        );
        assert_eq!(diversity(&cell(&[&[123.0, -9.0]])), 0.0);
    }

    #[test]
    fn ranking_tie_break() {
        let r = rank_values([("a", 0.5), ("b", 0.9), ("c", 0.5)]);
        let got: Vec<_> = r.iter().map(|x| (x.item, x.rank)).collect();
        assert_eq!(got, vec![("b", 1), ("a", 2), ("c", 3)]);
        let single = rank_values([("only", 0.0)]);
        assert_eq!(single[0].rank, 1);
    }

    #[test]
    fn smoothing_examples() {
        assert_eq!(
            smooth_scores(&[true, false, false, false], 1),
            vec![0.5, 0.0, 0.0, 0.0]
        );
        assert_eq!(smooth_scores(&[true; 7], 3), vec![1.0; 7]);
        assert_eq!(smooth_scores(&[false; 5], 100), vec![0.0; 5]);
        assert!(smooth_scores(&[], 100).is_empty());
    }

    #[test]
    fn default_window_spans_101_items() {
        // A single positive label at index 100 is visible from index 0 but not
        // from a window of 100 items.
        let mut labels = vec![false; 300];
        labels[100] = true;
        let s = smooth_scores(&labels, DEFAULT_SMOOTHING_WINDOW);
        assert_eq!(s[0], 1.0 / 101.0);
        labels[100] = false;
        labels[101] = true;
        assert_eq!(smooth_scores(&labels, DEFAULT_SMOOTHING_WINDOW)[0], 0.0);
    }
}
