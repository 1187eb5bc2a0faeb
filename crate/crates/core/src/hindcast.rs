//! Retrospective check of top-ranked meshes against later large events.

use alloc::vec::Vec;

use crate::diversity::DiversityRecord;
use crate::error::{Error, Result};
use crate::geo::{MeshId, QuakeEvent};

pub const DEFAULT_MAG_THRESHOLD: f64 = 6.0;
pub const DEFAULT_HORIZON_DAYS: i64 = 730;
pub const MILLIS_PER_DAY: i64 = 86_400_000;

#[derive(Debug, Clone, PartialEq)]
pub struct HindcastParams {
    pub mag_threshold: f64,
    /// Events count if they occur within this long after `train_end_ms`.
    pub horizon_ms: i64,
    pub top_n: usize,
    pub mesh_width: f64,
    /// Time of the last training event.
    pub train_end_ms: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchClass {
    SameMesh,
    AdjacentMesh,
    Miss,
}

impl MatchClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatchClass::SameMesh => "same-mesh",
            MatchClass::AdjacentMesh => "adjacent-mesh",
            MatchClass::Miss => "miss",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub mesh: MeshId,
    pub rank: usize,
    pub div: f64,
    pub class: MatchClass,
    /// Earliest qualifying event of the best match class.
    pub matched: Option<QuakeEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HindcastReport {
    pub per_cell: Vec<CellOutcome>,
    /// Effective N after clamping to the ranking length.
    pub top_n: usize,
    pub top_n_clamped: bool,
    pub precision_same_mesh: f64,
    pub precision_adjacent: f64,
    /// `None` when no event qualifies.
    pub recall: Option<f64>,
    pub qualifying_event_count: usize,
}

/// Scores the top `params.top_n` meshes of `ranking` against `future`.
///
/// An event qualifies when its magnitude reaches the threshold and it occurs
/// within the horizon after the training window. A mesh is a same-mesh hit if
/// a qualifying event falls inside it, an adjacent hit if one falls in any of
/// its eight neighbours. Every evaluation event must lie strictly after the
/// training window.
pub fn hindcast(
    ranking: &[DiversityRecord<MeshId>],
    future: &[QuakeEvent],
    params: &HindcastParams,
) -> Result<HindcastReport> {
    if let Some(first) = future.iter().map(|e| e.time_ms).min() {
        if first <= params.train_end_ms {
            return Err(Error::Leakage {
                train_end_ms: params.train_end_ms,
                first_eval_ms: first,
            });
        }
    }
    let horizon_end = params.train_end_ms.saturating_add(params.horizon_ms);
    let mut qualifying: Vec<(QuakeEvent, MeshId)> = future
        .iter()
        .filter(|e| e.magnitude >= params.mag_threshold && e.time_ms <= horizon_end)
        .map(|e| (*e, e.mesh(params.mesh_width)))
        .collect();
    qualifying.sort_by_key(|(e, _)| e.time_ms);

    let top_n = params.top_n.min(ranking.len());
    let top = &ranking[..top_n];
    let mut per_cell = Vec::with_capacity(top_n);
    for record in top {
        let same = qualifying.iter().find(|(_, m)| *m == record.item);
        let near = qualifying
            .iter()
            .find(|(_, m)| m.ring_distance(&record.item) == 1);
        let (class, matched) = match (same, near) {
            (Some((e, _)), _) => (MatchClass::SameMesh, Some(*e)),
            (None, Some((e, _))) => (MatchClass::AdjacentMesh, Some(*e)),
            (None, None) => (MatchClass::Miss, None),
        };
        per_cell.push(CellOutcome {
            mesh: record.item,
            rank: record.rank,
            div: record.div,
            class,
            matched,
        });
    }
    let same_hits = per_cell
        .iter()
        .filter(|c| c.class == MatchClass::SameMesh)
        .count();
    let any_hits = per_cell
        .iter()
        .filter(|c| c.class != MatchClass::Miss)
        .count();
    let ratio = |hits: usize| {
        if top_n == 0 {
            0.0
        } else {
            hits as f64 / top_n as f64
        }
    };
    let recall = if qualifying.is_empty() {
        None
    } else {
        let covered = qualifying
            .iter()
            .filter(|(_, m)| top.iter().any(|r| r.item.ring_distance(m) <= 1))
            .count();
        Some(covered as f64 / qualifying.len() as f64)
    };
    Ok(HindcastReport {
        per_cell,
        top_n,
        top_n_clamped: params.top_n > ranking.len(),
        precision_same_mesh: ratio(same_hits),
        precision_adjacent: ratio(any_hits),
        recall,
        qualifying_event_count: qualifying.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diversity::rank_values;
    use alloc::vec;

    fn ev(t: i64, lat: f64, lon: f64, mag: f64) -> QuakeEvent {
        QuakeEvent::new(t, lat, lon, 10.0, mag).unwrap()
    }

    fn params(top_n: usize) -> HindcastParams {
        HindcastParams {
            mag_threshold: DEFAULT_MAG_THRESHOLD,
            horizon_ms: DEFAULT_HORIZON_DAYS * MILLIS_PER_DAY,
            top_n,
            mesh_width: 0.5,
            train_end_ms: 1_000,
        }
    }

    fn ranking() -> Vec<DiversityRecord<MeshId>> {
        rank_values([
            (MeshId::new(75, 283), 0.9),
            (MeshId::new(70, 270), 0.5),
            (MeshId::new(60, 260), 0.1),
        ])
    }

    #[test]
    fn top_one_same_mesh_hit() {
        let future = vec![ev(2_000, 37.7, 141.8, 6.7)];
        let r = hindcast(&ranking(), &future, &params(1)).unwrap();
        assert_eq!(r.per_cell[0].class, MatchClass::SameMesh);
        assert_eq!(r.precision_same_mesh, 1.0);
        assert_eq!(r.precision_adjacent, 1.0);
        assert_eq!(r.recall, Some(1.0));
        assert_eq!(r.qualifying_event_count, 1);
    }

    #[test]
    fn adjacent_and_miss() {
        // 35.6/0.5 = 71.2 -> row 71, col 270: adjacent to (70, 270) only.
        let future = vec![ev(2_000, 35.6, 135.1, 6.0), ev(3_000, 10.0, 10.0, 7.0)];
        let r = hindcast(&ranking(), &future, &params(3)).unwrap();
        let classes: Vec<_> = r.per_cell.iter().map(|c| c.class).collect();
        assert_eq!(
            classes,
            vec![MatchClass::Miss, MatchClass::AdjacentMesh, MatchClass::Miss]
        );
        assert_eq!(r.precision_same_mesh, 0.0);
        assert!((r.precision_adjacent - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.recall, Some(0.5));
    }

    #[test]
    fn threshold_and_horizon_filter() {
        let late = 1_000 + DEFAULT_HORIZON_DAYS * MILLIS_PER_DAY + 1;
        let future = vec![ev(2_000, 37.7, 141.8, 5.9), ev(late, 37.7, 141.8, 8.0)];
        let r = hindcast(&ranking(), &future, &params(3)).unwrap();
        assert_eq!(r.qualifying_event_count, 0);
        assert_eq!(r.recall, None);
        assert_eq!(r.precision_same_mesh, 0.0);
        assert!(r.per_cell.iter().all(|c| c.class == MatchClass::Miss));
    }

    #[test]
    fn empty_future() {
        let r = hindcast(&ranking(), &[], &params(2)).unwrap();
        assert_eq!(
            (r.qualifying_event_count, r.recall, r.precision_adjacent),
            (0, None, 0.0)
        );
    }

    #[test]
    fn leakage_is_rejected() {
        let future = vec![ev(2_000, 0.0, 0.0, 6.0), ev(1_000, 0.0, 0.0, 1.0)];
        assert!(matches!(
            hindcast(&ranking(), &future, &params(1)),
            Err(Error::Leakage {
                train_end_ms: 1_000,
                first_eval_ms: 1_000
            })
        ));
    }

    #[test]
    fn top_n_is_clamped() {
        let r = hindcast(&ranking(), &[], &params(10)).unwrap();
        assert!(r.top_n_clamped);
        assert_eq!(r.top_n, 3);
    }
}
