//! Command-line arguments. Every argument struct is also serialized into
//! the run manifest so a run can be replayed exactly.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use semcell_core::geo::{GeoInit, Windowing};
use semcell_core::text::MissingTokenPolicy;
use semcell_core::{DistanceMode, InitMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "semcell",
    version,
    about = "Evolve semantic cells over text or earthquake catalogs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evolve word cells over the sentences of one or more text files.
    EvolveText(EvolveTextArgs),
    /// Evolve mesh cells over windows of an earthquake catalog.
    EvolveGeo(EvolveGeoArgs),
    /// Score a geo run's top meshes against a later catalog.
    Hindcast(HindcastArgs),
    /// Rank the cells of a snapshot by diversity.
    Rank(RankArgs),
    /// Smooth binary labels over a diversity ranking.
    Smooth(SmoothArgs),
    /// Re-execute the command recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitModeArg {
    Identical,
    Jitter,
}

impl From<InitModeArg> for InitMode {
    fn from(m: InitModeArg) -> Self {
        match m {
            InitModeArg::Identical => InitMode::Identical,
            InitModeArg::Jitter => InitMode::Jitter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceModeArg {
    Plain,
    Attenuated,
}

impl From<DistanceModeArg> for DistanceMode {
    fn from(m: DistanceModeArg) -> Self {
        match m {
            DistanceModeArg::Plain => DistanceMode::PlainAlpha,
            DistanceModeArg::Attenuated => DistanceMode::Attenuated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingTokensArg {
    Skip,
    Error,
}

impl From<MissingTokensArg> for MissingTokenPolicy {
    fn from(m: MissingTokensArg) -> Self {
        match m {
            MissingTokensArg::Skip => MissingTokenPolicy::Skip,
            MissingTokensArg::Error => MissingTokenPolicy::Error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeoInitArg {
    FirstEvent,
    MeshCenter,
    EventCentroid,
}

impl From<GeoInitArg> for GeoInit {
    fn from(m: GeoInitArg) -> Self {
        match m {
            GeoInitArg::FirstEvent => GeoInit::FirstEvent,
            GeoInitArg::MeshCenter => GeoInit::MeshCenter,
            GeoInitArg::EventCentroid => GeoInit::EventCentroid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowingArg {
    Blocks,
    Sliding,
    Time,
}

impl WindowingArg {
    pub fn resolve(self, window_days: Option<f64>) -> Option<Windowing> {
        match self {
            WindowingArg::Blocks => Some(Windowing::Blocks),
            WindowingArg::Sliding => Some(Windowing::Sliding),
            WindowingArg::Time => window_days.map(|d| Windowing::TimeSpan {
                millis: (d * 86_400_000.0).round() as i64,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingLabelsArg {
    ZeroFill,
    Error,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvolveTextArgs {
    /// UTF-8 text files, processed in the given order.
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    /// Word-embedding text file providing the base vectors.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Use deterministic random base vectors instead of an embedding file.
    #[arg(long)]
    pub builtin_init: bool,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub g: usize,
    /// Vector dimension; defaults to the embedding file's, or 50 with --builtin-init.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitModeArg::Jitter)]
    pub init_mode: InitModeArg,
    /// Half-width of the uniform chromosome jitter.
    #[arg(long, default_value_t = 0.01)]
    pub jitter: f64,
    #[arg(long, value_enum, default_value_t = DistanceModeArg::Plain)]
    pub distance_mode: DistanceModeArg,
    #[arg(long, default_value_t = 1e-6)]
    pub attenuation_epsilon: f64,
    /// File with one stop word per line.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// Analyse each corpus file on its own, in numbered subdirectories.
    #[arg(long)]
    pub per_file: bool,
    #[arg(long, value_enum, default_value_t = MissingTokensArg::Error)]
    pub missing_tokens: MissingTokensArg,
    /// Also write trace.tsv with every update.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvolveGeoArgs {
    /// Catalog CSV with header `time,lat,lon,depth,magnitude`.
    pub catalog: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub g: usize,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitModeArg::Identical)]
    pub init_mode: InitModeArg,
    /// Half-width of the jitter, in degrees, when --init-mode jitter.
    #[arg(long, default_value_t = 0.01)]
    pub jitter: f64,
    #[arg(long, value_enum, default_value_t = DistanceModeArg::Plain)]
    pub distance_mode: DistanceModeArg,
    #[arg(long, default_value_t = 1e-6)]
    pub attenuation_epsilon: f64,
    /// Events per co-existence unit.
    #[arg(long, default_value_t = 10)]
    pub window_size: usize,
    #[arg(long, value_enum, default_value_t = WindowingArg::Blocks)]
    pub windowing: WindowingArg,
    /// Unit length in days for --windowing time.
    #[arg(long)]
    pub window_days: Option<f64>,
    /// Mesh width in degrees of latitude and longitude.
    #[arg(long, default_value_t = 0.5)]
    pub mesh_width: f64,
    #[arg(long, value_enum, default_value_t = GeoInitArg::FirstEvent)]
    pub geo_init: GeoInitArg,
    #[arg(long, default_value_t = 15)]
    pub top_red: usize,
    #[arg(long, default_value_t = 50)]
    pub top_orange: usize,
    /// Ignore events below this magnitude.
    #[arg(long)]
    pub min_mag: Option<f64>,
    /// First instant of the training window (inclusive, ISO-8601).
    #[arg(long)]
    pub train_start: Option<String>,
    /// End of the training window (exclusive, ISO-8601).
    #[arg(long)]
    pub train_end: Option<String>,
    /// Shorthand for a training window covering one calendar year.
    #[arg(long, conflicts_with_all = ["train_start", "train_end"])]
    pub train_year: Option<i32>,
    #[arg(long)]
    pub skip_bad_rows: bool,
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct HindcastArgs {
    /// Output directory of a completed evolve-geo run.
    #[arg(long)]
    pub run_dir: PathBuf,
    /// Catalog of events after the training window.
    #[arg(long)]
    pub eval_catalog: PathBuf,
    #[arg(long, default_value_t = 6.0)]
    pub mag_threshold: f64,
    #[arg(long, default_value_t = 730)]
    pub horizon_days: i64,
    #[arg(long, default_value_t = 15)]
    pub top_n: usize,
    #[arg(long)]
    pub skip_bad_rows: bool,
    /// Defaults to `<run-dir>/hindcast`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RankArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SmoothArgs {
    /// ranking.csv
    #[arg(long)]
    pub ranking: PathBuf,
    /// CSV `item,label` with labels 0 or 1.
    #[arg(long)]
    pub labels: PathBuf,
    /// Items looked ahead from each rank; the window spans window + 1 items.
    #[arg(long, default_value_t = 100)]
    pub window: usize,
    #[arg(long, value_enum, default_value_t = MissingLabelsArg::Error)]
    pub missing_labels: MissingLabelsArg,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
