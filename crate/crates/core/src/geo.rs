//! Earthquake catalogs as co-existence data: mesh regions are items, blocks
//! of consecutive events are units, epicenter coordinates seed the chromosomes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cell::{CellPopulation, CoexistenceUnit};
use crate::config::{EvolutionConfig, InitMode};
use crate::diversity::DiversityRecord;
use crate::error::{Error, Result};
use crate::init::initialize_cells;

pub const DEFAULT_MESH_WIDTH: f64 = 0.5;
pub const DEFAULT_WINDOW_SIZE: usize = 10;
pub const DEFAULT_TOP_RED: usize = 15;
pub const DEFAULT_TOP_ORANGE: usize = 50;

/// One catalog entry. Times are milliseconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuakeEvent {
    pub time_ms: i64,
    pub lat: f64,
    pub lon: f64,
    /// Kilometres; carried through but not used by the model.
    pub depth_km: f64,
    pub magnitude: f64,
}

impl QuakeEvent {
    pub fn new(time_ms: i64, lat: f64, lon: f64, depth_km: f64, magnitude: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::CoordinateOutOfRange { lat, lon });
        }
        if !depth_km.is_finite() || !magnitude.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "non-finite depth or magnitude ({depth_km}, {magnitude})"
            )));
        }
        Ok(QuakeEvent {
            time_ms,
            lat,
            lon,
            depth_km,
            magnitude,
        })
    }

    pub fn mesh(&self, width: f64) -> MeshId {
        mesh_of(self.lat, self.lon, width)
    }
}

/// Index of a half-open `width x width` degree cell `[i*w, (i+1)*w) x [j*w, (j+1)*w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeshId {
    pub lat_index: i64,
    pub lon_index: i64,
}

impl MeshId {
    pub fn new(lat_index: i64, lon_index: i64) -> Self {
        MeshId {
            lat_index,
            lon_index,
        }
    }

    /// Chebyshev distance in mesh steps.
    pub fn ring_distance(&self, other: &MeshId) -> u64 {
        let di = self.lat_index.abs_diff(other.lat_index);
        let dj = self.lon_index.abs_diff(other.lon_index);
        di.max(dj)
    }

    /// `(lat, lon)` of the cell centre.
    pub fn center(&self, width: f64) -> [f64; 2] {
        [
            (self.lat_index as f64 + 0.5) * width,
            (self.lon_index as f64 + 0.5) * width,
        ]
    }
}

impl fmt::Display for MeshId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lat_index, self.lon_index)
    }
}

impl FromStr for MeshId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidItemId(String::from(s));
        let (i, j) = s.split_once(':').ok_or_else(bad)?;
        Ok(MeshId {
            lat_index: i.parse().map_err(|_| bad())?,
            lon_index: j.parse().map_err(|_| bad())?,
        })
    }
}

/// `(floor(lat / width), floor(lon / width))`.
pub fn mesh_of(lat: f64, lon: f64, width: f64) -> MeshId {
    MeshId {
        lat_index: libm::floor(lat / width) as i64,
        lon_index: libm::floor(lon / width) as i64,
    }
}

/// Where a mesh's chromosomes start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeoInit {
    /// Epicenter of the first event observed in the mesh.
    #[default]
    FirstEvent,
    /// Geometric centre of the mesh cell.
    MeshCenter,
    /// Mean epicenter of all events in the mesh.
    EventCentroid,
}

/// How events are grouped into co-existence units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Windowing {
    /// Disjoint blocks of `window_size` consecutive events; a trailing partial block is dropped.
    #[default]
    Blocks,
    /// One unit per run of `window_size` consecutive events, advancing by one event.
    Sliding,
    /// Disjoint time spans of the given length starting at the first event.
    TimeSpan { millis: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoRunConfig {
    /// Must have `dim == 2`.
    pub evolution: EvolutionConfig,
    pub window_size: usize,
    pub mesh_width: f64,
    pub init: GeoInit,
    pub windowing: Windowing,
}

impl Default for GeoRunConfig {
    fn default() -> Self {
        GeoRunConfig {
            evolution: EvolutionConfig {
                dim: 2,
                init_mode: InitMode::Identical,
                ..EvolutionConfig::default()
            },
            window_size: DEFAULT_WINDOW_SIZE,
            mesh_width: DEFAULT_MESH_WIDTH,
            init: GeoInit::FirstEvent,
            windowing: Windowing::Blocks,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeoRun {
    pub population: CellPopulation<MeshId>,
    pub units: Vec<CoexistenceUnit<MeshId>>,
    /// Initial `(lat, lon)` of every mesh before jitter and evolution.
    pub origins: BTreeMap<MeshId, [f64; 2]>,
    pub event_counts: BTreeMap<MeshId, usize>,
    /// Events not covered by any unit.
    pub dropped_events: usize,
    pub last_event_ms: i64,
}

/// Builds mesh cells and event-window units from a time-sorted catalog.
pub fn build_geo_run(events: &[QuakeEvent], config: &GeoRunConfig) -> Result<GeoRun> {
    if config.evolution.dim != 2 {
        return Err(Error::InvalidConfig(format!(
            "geo runs use 2-dimensional chromosomes, got dim = {}",
            config.evolution.dim
        )));
    }
    if config.window_size < 2 {
        return Err(Error::InvalidConfig(format!(
            "window size must be at least 2, got {}",
            config.window_size
        )));
    }
    if !(config.mesh_width > 0.0 && config.mesh_width.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "mesh width must be positive, got {}",
            config.mesh_width
        )));
    }
    if let Windowing::TimeSpan { millis } = config.windowing {
        if millis <= 0 {
            return Err(Error::InvalidConfig("time window must be positive".into()));
        }
    }
    if events.windows(2).any(|w| w[1].time_ms < w[0].time_ms) {
        return Err(Error::InvalidConfig("events must be sorted by time".into()));
    }

    let width = config.mesh_width;
    let meshes: Vec<MeshId> = events.iter().map(|e| e.mesh(width)).collect();
    let n = config.window_size;
    let (units, covered) = match config.windowing {
        Windowing::Blocks => {
            let units: Vec<_> = meshes
                .chunks_exact(n)
                .enumerate()
                .map(|(i, block)| CoexistenceUnit::from_occurrences(i, block.iter().copied()))
                .collect();
            let covered = units.len() * n;
            (units, covered)
        }
        Windowing::Sliding => {
            let units: Vec<_> = meshes
                .windows(n)
                .enumerate()
                .map(|(i, w)| CoexistenceUnit::from_occurrences(i, w.iter().copied()))
                .collect();
            let covered = if units.is_empty() { 0 } else { meshes.len() };
            (units, covered)
        }
        Windowing::TimeSpan { millis } => {
            let mut units = Vec::new();
            let mut start = 0;
            while start < events.len() {
                let t0 = events[0].time_ms;
                let slot = (events[start].time_ms - t0).div_euclid(millis);
                let mut end = start;
                while end < events.len() && (events[end].time_ms - t0).div_euclid(millis) == slot {
                    end += 1;
                }
                units.push(CoexistenceUnit::from_occurrences(
                    units.len(),
                    meshes[start..end].iter().copied(),
                ));
                start = end;
            }
            (units, events.len())
        }
    };
    if units.is_empty() {
        return Err(Error::NoCompleteUnit {
            events: events.len(),
            window: n,
        });
    }

    let mut event_counts: BTreeMap<MeshId, usize> = BTreeMap::new();
    let mut first: BTreeMap<MeshId, [f64; 2]> = BTreeMap::new();
    let mut sums: BTreeMap<MeshId, [f64; 2]> = BTreeMap::new();
    for (event, mesh) in events.iter().zip(&meshes) {
        *event_counts.entry(*mesh).or_default() += 1;
        first.entry(*mesh).or_insert([event.lat, event.lon]);
        let s = sums.entry(*mesh).or_insert([0.0, 0.0]);
        s[0] += event.lat;
        s[1] += event.lon;
    }
    let origins: BTreeMap<MeshId, [f64; 2]> = match config.init {
        GeoInit::FirstEvent => first,
        GeoInit::MeshCenter => event_counts.keys().map(|m| (*m, m.center(width))).collect(),
        GeoInit::EventCentroid => sums
            .iter()
            .map(|(m, s)| {
                let c = event_counts[m] as f64;
                (*m, [s[0] / c, s[1] / c])
            })
            .collect(),
    };
    let population = initialize_cells(
        origins.iter().map(|(m, xy)| (m, xy.as_slice())),
        &config.evolution,
    )?;
    Ok(GeoRun {
        population,
        units,
        origins,
        event_counts,
        dropped_events: events.len() - covered,
        last_event_ms: events.last().map_or(0, |e| e.time_ms),
    })
}

/// A ranked mesh drawn at its original location.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPoint {
    pub mesh: MeshId,
    pub rank: usize,
    pub div: f64,
    pub lat: f64,
    pub lon: f64,
}

/// An evolved chromosome of a top-ranked mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromosomePoint {
    pub mesh: MeshId,
    pub rank: usize,
    pub chromosome_index: usize,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MapCategories {
    /// Ranks `1..=top_red`.
    pub red: Vec<RankedPoint>,
    /// Ranks `top_red + 1..=top_orange`.
    pub orange: Vec<RankedPoint>,
    /// All chromosomes of the red and orange meshes after evolution.
    pub blue: Vec<ChromosomePoint>,
    /// Set when there were fewer meshes than `top_orange` and the bands were scaled down.
    pub shrunk: bool,
}

/// Splits a diversity ranking into map categories.
///
/// With fewer than `top_orange` meshes, the orange band shrinks to the mesh
/// count and the red band shrinks by the same ratio (rounded, at least one).
pub fn categorize_for_map(
    ranking: &[DiversityRecord<MeshId>],
    origins: &BTreeMap<MeshId, [f64; 2]>,
    evolved: &CellPopulation<MeshId>,
    top_red: usize,
    top_orange: usize,
) -> Result<MapCategories> {
    if top_red > top_orange {
        return Err(Error::InvalidConfig(format!(
            "top red ({top_red}) must not exceed top orange ({top_orange})"
        )));
    }
    let n = ranking.len();
    let (red_len, orange_end, shrunk) = if n >= top_orange {
        (top_red, top_orange, false)
    } else {
        let scaled = (top_red * n + top_orange / 2) / top_orange;
        let red = if top_red > 0 { scaled.max(1).min(n) } else { 0 };
        (red, n, true)
    };
    let mut out = MapCategories {
        shrunk,
        ..Default::default()
    };
    for record in &ranking[..orange_end] {
        let origin = origins
            .get(&record.item)
            .ok_or_else(|| Error::UnknownMember {
                unit: 0,
                item: format!("{}", record.item),
            })?;
        let point = RankedPoint {
            mesh: record.item,
            rank: record.rank,
            div: record.div,
            lat: origin[0],
            lon: origin[1],
        };
        if record.rank <= red_len {
            out.red.push(point);
        } else {
            out.orange.push(point);
        }
        let cell = evolved
            .get(&record.item)
            .ok_or_else(|| Error::UnknownMember {
                unit: 0,
                item: format!("{}", record.item),
            })?;
        for (j, c) in cell.chromosomes().iter().enumerate() {
            out.blue.push(ChromosomePoint {
                mesh: record.item,
                rank: record.rank,
                chromosome_index: j,
                lat: c.genes()[0],
                lon: c.genes()[1],
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ev(t: i64, lat: f64, lon: f64) -> QuakeEvent {
        QuakeEvent::new(t, lat, lon, 10.0, 3.0).unwrap()
    }

    #[test]
    fn mesh_examples() {
        assert_eq!(mesh_of(35.68, 139.76, 0.5), MeshId::new(71, 279));
        assert_eq!(mesh_of(-0.2, 0.2, 0.5), MeshId::new(-1, 0));
        assert_eq!(mesh_of(35.5, 0.0, 0.5).lat_index, 71);
        assert_eq!(mesh_of(35.4999, 0.0, 0.5).lat_index, 70);
    }

    #[test]
    fn mesh_id_text_form() {
        let m = MeshId::new(-3, 281);
        assert_eq!(alloc::string::ToString::to_string(&m), "-3:281");
        assert_eq!("-3:281".parse::<MeshId>().unwrap(), m);
        assert!("3".parse::<MeshId>().is_err());
        assert!("a:b".parse::<MeshId>().is_err());
    }

    #[test]
    fn event_bounds() {
        assert!(QuakeEvent::new(0, 95.0, 0.0, 0.0, 1.0).is_err());
        assert!(QuakeEvent::new(0, 0.0, -180.5, 0.0, 1.0).is_err());
        assert!(QuakeEvent::new(0, 90.0, 180.0, 0.0, 1.0).is_ok());
    }

    fn line(n: usize) -> Vec<QuakeEvent> {
        (0..n)
            .map(|i| ev(i as i64, 30.0 + i as f64, 130.0))
            .collect()
    }

    #[test]
    fn block_counts() {
        let cfg = GeoRunConfig::default();
        let run = build_geo_run(&line(20), &cfg).unwrap();
        assert_eq!(run.units.len(), 2);
        assert_eq!(run.dropped_events, 0);
        let run = build_geo_run(&line(25), &cfg).unwrap();
        assert_eq!(run.units.len(), 2);
        assert_eq!(run.dropped_events, 5);
        assert_eq!(run.population.len(), 25);
        assert!(matches!(
            build_geo_run(&line(9), &cfg),
            Err(Error::NoCompleteUnit {
                events: 9,
                window: 10
            })
        ));
        let tiny = GeoRunConfig {
            window_size: 1,
            ..cfg
        };
        assert!(matches!(
            build_geo_run(&line(9), &tiny),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn single_mesh_unit() {
        let events: Vec<_> = (0..10)
            .map(|i| ev(i, 35.1 + 0.01 * i as f64, 139.1))
            .collect();
        let run = build_geo_run(&events, &GeoRunConfig::default()).unwrap();
        assert_eq!(run.units.len(), 1);
        assert_eq!(run.units[0].members(), &[MeshId::new(70, 278)]);
        assert_eq!(run.origins[&MeshId::new(70, 278)], [35.1, 139.1]);
    }

    #[test]
    fn init_variants() {
        let events = vec![ev(0, 35.1, 139.1), ev(1, 35.3, 139.3), ev(2, 40.0, 140.0)];
        let base = GeoRunConfig {
            window_size: 3,
            ..Default::default()
        };
        let m = MeshId::new(70, 278);
        let first = build_geo_run(&events, &base).unwrap();
        assert_eq!(first.origins[&m], [35.1, 139.1]);
        let center = build_geo_run(
            &events,
            &GeoRunConfig {
                init: GeoInit::MeshCenter,
                ..base.clone()
            },
        )
        .unwrap();
        assert_eq!(center.origins[&m], [35.25, 139.25]);
        let mean = build_geo_run(
            &events,
            &GeoRunConfig {
                init: GeoInit::EventCentroid,
                ..base
            },
        )
        .unwrap();
        let o = mean.origins[&m];
        assert!((o[0] - 35.2).abs() < 1e-12 && (o[1] - 139.2).abs() < 1e-12);
    }

    #[test]
    fn sliding_and_time_windows() {
        let sliding = GeoRunConfig {
            windowing: Windowing::Sliding,
            ..Default::default()
        };
        let run = build_geo_run(&line(25), &sliding).unwrap();
        assert_eq!(run.units.len(), 16);
        assert_eq!(run.dropped_events, 0);
        let spans = GeoRunConfig {
            windowing: Windowing::TimeSpan { millis: 4 },
            ..Default::default()
        };
        let run = build_geo_run(&line(10), &spans).unwrap();
        let sizes: Vec<_> = run.units.iter().map(|u| u.len()).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
    }

    #[test]
    fn unsorted_events_are_rejected() {
        let mut events = line(10);
        events.swap(0, 1);
        assert!(build_geo_run(&events, &GeoRunConfig::default()).is_err());
    }

    fn categories_fixture(n: usize, g: usize) -> (Vec<DiversityRecord<MeshId>>, GeoRun) {
        let events: Vec<_> = (0..n * 2)
            .map(|i| ev(i as i64, -40.0 + (i % n) as f64, 0.0))
            .collect();
        let cfg = GeoRunConfig {
            evolution: EvolutionConfig {
                g,
                ..GeoRunConfig::default().evolution
            },
            ..Default::default()
        };
        let run = build_geo_run(&events, &cfg).unwrap();
        let ranking = crate::diversity::rank_by_diversity(&run.population);
        (ranking, run)
    }

    #[test]
    fn category_counts() {
        let (ranking, run) = categories_fixture(50, 5);
        let c = categorize_for_map(&ranking, &run.origins, &run.population, 15, 50).unwrap();
        assert_eq!((c.red.len(), c.orange.len(), c.blue.len()), (15, 35, 250));
        assert!(!c.shrunk);
        let c = categorize_for_map(&ranking, &run.origins, &run.population, 1, 1).unwrap();
        assert_eq!((c.red.len(), c.orange.len(), c.blue.len()), (1, 0, 5));

        let (ranking, run) = categories_fixture(10, 2);
        let c = categorize_for_map(&ranking, &run.origins, &run.population, 1, 1).unwrap();
        assert_eq!((c.red.len(), c.orange.len(), c.blue.len()), (1, 0, 2));
        let c = categorize_for_map(&ranking, &run.origins, &run.population, 15, 50).unwrap();
        assert!(c.shrunk);
        assert_eq!((c.red.len(), c.orange.len(), c.blue.len()), (3, 7, 20));
        assert!(categorize_for_map(&ranking, &run.origins, &run.population, 5, 4).is_err());
    }
}
