//! Command implementations. Each command writes its artifacts plus a
//! manifest into an output directory.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, SecondsFormat, Utc};
use semcell_core::geo::{build_geo_run, categorize_for_map, GeoRunConfig, MeshId};
use semcell_core::hindcast::{hindcast, HindcastParams, HindcastReport, MILLIS_PER_DAY};
use semcell_core::text::{
    build_text_run, builtin_base_vectors, corpus_units, EmbeddingTable, TextRunConfig,
};
use semcell_core::{evolve, rank_by_diversity, smooth_scores, DiversityRecord, EvolutionConfig};
use serde_json::{json, Value};

use crate::catalog::{format_time, parse_catalog, parse_time, CatalogOptions};
use crate::cli::*;
use crate::embeddings::load_embeddings;
use crate::error::{Error, Result};
use crate::geojson::map_feature_collection;
use crate::manifest::{self, RunManifest};
use crate::snapshot::{read_snapshot, write_snapshot};
use crate::tables::{read_labels, read_ranking, write_ranking, write_smoothed, SmoothedRow};
use crate::trace::write_trace;

pub const SNAPSHOT_PRE: &str = "snapshot_pre.txt";
pub const SNAPSHOT_POST: &str = "snapshot_post.txt";
pub const RANKING: &str = "ranking.csv";
pub const MAP: &str = "map.geojson";
pub const HINDCAST: &str = "hindcast.json";
pub const TRACE: &str = "trace.tsv";
pub const SMOOTHED: &str = "smoothed.csv";

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::EvolveText(args) => evolve_text(args),
        Command::EvolveGeo(args) => evolve_geo(args),
        Command::Hindcast(args) => run_hindcast(args),
        Command::Rank(args) => rank(args),
        Command::Smooth(args) => smooth(args),
        Command::Rerun(args) => rerun(args),
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|e| Error::io(path, e))
}

fn existing(path: &Path) -> Result<PathBuf> {
    path.canonicalize().map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `dir/name` through `body`.
fn write_file<F>(dir: &Path, name: &str, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|()| out.flush())
        .map_err(|e| Error::io(&path, e))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| {
        Error::data(
            path,
            format!("invalid UTF-8 at byte {}", e.utf8_error().valid_up_to()),
        )
    })
}

fn config_echo(cfg: &EvolutionConfig) -> Value {
    json!({
        "alpha": cfg.alpha,
        "g": cfg.g,
        "dim": cfg.dim,
        "rounds": cfg.rounds,
        "distance_mode": format!("{:?}", cfg.distance_mode),
        "attenuation_epsilon": cfg.attenuation_epsilon,
        "tie_break": format!("{:?}", cfg.tie_break),
        "seed": cfg.seed,
        "init_mode": format!("{:?}", cfg.init_mode),
        "jitter_scale": cfg.jitter_scale,
    })
}

fn evolve_text(mut args: EvolveTextArgs) -> Result<()> {
    let started = now();
    match (&args.embeddings, args.builtin_init) {
        (Some(_), true) => {
            return Err(Error::Usage(
                "--embeddings and --builtin-init are mutually exclusive".into(),
            ))
        }
        (None, false) => {
            return Err(Error::Usage(
                "one of --embeddings or --builtin-init is required".into(),
            ))
        }
        _ => {}
    }
    args.corpus = args
        .corpus
        .iter()
        .map(|p| existing(p))
        .collect::<Result<_>>()?;
    args.embeddings = args.embeddings.as_deref().map(existing).transpose()?;
    args.stoplist = args.stoplist.as_deref().map(existing).transpose()?;
    args.out_dir = absolute(&args.out_dir)?;

    let mut manifest = RunManifest::new(Command::EvolveText(args.clone()), started);
    for p in &args.corpus {
        manifest.add_input(p)?;
    }
    let documents: Vec<String> = args
        .corpus
        .iter()
        .map(|p| read_text(p))
        .collect::<Result<_>>()?;

    let mut stop_words = BTreeSet::new();
    if let Some(path) = &args.stoplist {
        manifest.add_input(path)?;
        stop_words.extend(
            read_text(path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from),
        );
    }

    let loaded = match &args.embeddings {
        Some(path) => {
            manifest.add_input(path)?;
            let loaded = load_embeddings(path)?;
            manifest.detail("embedding_rows", loaded.rows);
            manifest.detail("embedding_duplicates", loaded.duplicates);
            Some(loaded.table)
        }
        None => None,
    };
    let dim = match (&loaded, args.dim) {
        (Some(t), Some(d)) if t.dim() != d => {
            return Err(Error::Usage(format!(
                "--dim {d} disagrees with the embedding dimension {}",
                t.dim()
            )))
        }
        (Some(t), _) => t.dim(),
        (None, d) => d.unwrap_or(50),
    };
    let evolution = EvolutionConfig {
        alpha: args.alpha,
        g: args.g,
        dim,
        rounds: args.rounds,
        distance_mode: args.distance_mode.into(),
        attenuation_epsilon: args.attenuation_epsilon,
        seed: args.seed,
        init_mode: args.init_mode.into(),
        jitter_scale: args.jitter,
        ..Default::default()
    };
    evolution.validate()?;
    let config = TextRunConfig {
        evolution,
        missing: args.missing_tokens.into(),
        stop_words,
    };

    let groups: Vec<(PathBuf, Vec<&str>)> = if args.per_file {
        args.corpus
            .iter()
            .zip(&documents)
            .enumerate()
            .map(|(i, (path, doc))| {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("doc");
                let stem: String = stem
                    .chars()
                    .map(|c| {
                        if c.is_alphanumeric() || c == '-' || c == '_' {
                            c
                        } else {
                            '_'
                        }
                    })
                    .collect();
                (
                    args.out_dir.join(format!("{i:02}_{stem}")),
                    vec![doc.as_str()],
                )
            })
            .collect()
    } else {
        vec![(
            args.out_dir.clone(),
            documents.iter().map(String::as_str).collect(),
        )]
    };

    create_dir(&args.out_dir)?;
    let mut groups_echo = Vec::new();
    for (dir, docs) in &groups {
        create_dir(dir)?;
        let table: EmbeddingTable = match &loaded {
            Some(t) => t.clone(),
            None => builtin_base_vectors(&corpus_units(docs, &config.stop_words)?, dim, args.seed)?,
        };
        let mut run = build_text_run(docs, &table, &config)?;
        if !run.skipped.is_empty() {
            log::warn!("skipped {} token(s) without embeddings", run.skipped.len());
        }
        write_file(dir, SNAPSHOT_PRE, |w| write_snapshot(w, &run.population))?;
        let mut trace = Vec::new();
        let summary = evolve(
            &mut run.population,
            &run.units,
            args.trace.then_some(&mut trace),
        )?;
        write_file(dir, SNAPSHOT_POST, |w| write_snapshot(w, &run.population))?;
        let ranking = rank_by_diversity(&run.population);
        write_file(dir, RANKING, |w| write_ranking(w, &ranking))?;
        if args.trace {
            write_file(dir, TRACE, |w| write_trace(w, &trace))?;
        }
        manifest.item_count += run.population.len();
        manifest.unit_count += run.units.len();
        let rel = dir
            .strip_prefix(&args.out_dir)
            .unwrap_or(dir)
            .to_string_lossy()
            .into_owned();
        for name in [SNAPSHOT_PRE, SNAPSHOT_POST, RANKING]
            .into_iter()
            .chain(args.trace.then_some(TRACE))
        {
            manifest.outputs.push(if rel.is_empty() {
                name.to_string()
            } else {
                format!("{rel}/{name}")
            });
        }
        groups_echo.push(json!({
            "dir": rel,
            "items": run.population.len(),
            "units": run.units.len(),
            "updates": summary.updates,
            "skipped_tokens": run.skipped.len(),
        }));
    }
    manifest.detail("evolution", config_echo(&config.evolution));
    manifest.detail("builtin_init", args.builtin_init);
    manifest.detail("groups", groups_echo);
    manifest.finished_at = now();
    manifest.write(&args.out_dir)
}

fn train_window(args: &EvolveGeoArgs) -> Result<(Option<i64>, Option<i64>)> {
    if let Some(year) = args.train_year {
        let start = NaiveDate::from_ymd_opt(year, 1, 1);
        let end = NaiveDate::from_ymd_opt(year + 1, 1, 1);
        let ms = |d: Option<NaiveDate>| {
            d.and_then(|d| d.and_hms_opt(0, 0, 0))
                .map(|t| t.and_utc().timestamp_millis())
        };
        return match (ms(start), ms(end)) {
            (Some(s), Some(e)) => Ok((Some(s), Some(e))),
            _ => Err(Error::Usage(format!("--train-year {year} is out of range"))),
        };
    }
    let parse = |flag: &str, v: &Option<String>| -> Result<Option<i64>> {
        v.as_deref()
            .map(|s| {
                parse_time(s)
                    .ok_or_else(|| Error::Usage(format!("{flag}: cannot parse time {s:?}")))
            })
            .transpose()
    };
    Ok((
        parse("--train-start", &args.train_start)?,
        parse("--train-end", &args.train_end)?,
    ))
}

fn evolve_geo(mut args: EvolveGeoArgs) -> Result<()> {
    let started = now();
    args.catalog = existing(&args.catalog)?;
    args.out_dir = absolute(&args.out_dir)?;
    let windowing = args
        .windowing
        .resolve(args.window_days)
        .ok_or_else(|| Error::Usage("--windowing time requires --window-days".into()))?;
    let (start, end) = train_window(&args)?;

    let mut manifest = RunManifest::new(Command::EvolveGeo(args.clone()), started);
    manifest.add_input(&args.catalog)?;
    let catalog = parse_catalog(
        &args.catalog,
        &CatalogOptions {
            skip_bad_rows: args.skip_bad_rows,
            min_magnitude: args.min_mag,
        },
    )?;
    let events: Vec<_> = catalog
        .events
        .iter()
        .copied()
        .filter(|e| start.is_none_or(|s| e.time_ms >= s) && end.is_none_or(|t| e.time_ms < t))
        .collect();

    let config = GeoRunConfig {
        evolution: EvolutionConfig {
            alpha: args.alpha,
            g: args.g,
            dim: 2,
            rounds: args.rounds,
            distance_mode: args.distance_mode.into(),
            attenuation_epsilon: args.attenuation_epsilon,
            seed: args.seed,
            init_mode: args.init_mode.into(),
            jitter_scale: args.jitter,
            ..Default::default()
        },
        window_size: args.window_size,
        mesh_width: args.mesh_width,
        init: args.geo_init.into(),
        windowing,
    };
    let mut run = build_geo_run(&events, &config).map_err(|e| match e {
        semcell_core::Error::InvalidConfig(m) => Error::Usage(m),
        other => other.into(),
    })?;
    if run.dropped_events > 0 {
        log::info!(
            "{} trailing event(s) not in a complete unit",
            run.dropped_events
        );
    }
    if args.top_red > args.top_orange {
        return Err(Error::Usage(
            "--top-red must not exceed --top-orange".into(),
        ));
    }

    create_dir(&args.out_dir)?;
    let dir = &args.out_dir;
    let initial = run.population.clone();
    write_file(dir, SNAPSHOT_PRE, |w| write_snapshot(w, &initial))?;
    let mut trace = Vec::new();
    let summary = evolve(
        &mut run.population,
        &run.units,
        args.trace.then_some(&mut trace),
    )?;
    let ranking = rank_by_diversity(&run.population);
    let categories = categorize_for_map(
        &ranking,
        &run.origins,
        &run.population,
        args.top_red,
        args.top_orange,
    )?;
    if categories.shrunk {
        log::warn!(
            "only {} active meshes: bands shrunk to {} red + {} orange",
            ranking.len(),
            categories.red.len(),
            categories.orange.len()
        );
    }
    write_file(dir, SNAPSHOT_POST, |w| write_snapshot(w, &run.population))?;
    write_file(dir, RANKING, |w| write_ranking(w, &ranking))?;
    let map = map_feature_collection(&categories);
    write_file(dir, MAP, |w| {
        serde_json::to_writer_pretty(&mut *w, &map)?;
        w.write_all(b"\n")
    })?;
    manifest
        .outputs
        .extend([SNAPSHOT_PRE, SNAPSHOT_POST, RANKING, MAP].map(String::from));
    if args.trace {
        write_file(dir, TRACE, |w| write_trace(w, &trace))?;
        manifest.outputs.push(TRACE.into());
    }

    manifest.item_count = run.population.len();
    manifest.unit_count = run.units.len();
    manifest.detail("evolution", config_echo(&config.evolution));
    manifest.detail("mesh_width", config.mesh_width);
    manifest.detail("event_count", events.len());
    manifest.detail("dropped_events", run.dropped_events);
    manifest.detail("bad_rows", catalog.bad_rows.len());
    manifest.detail("below_min_magnitude", catalog.below_min_magnitude);
    manifest.detail("updates", summary.updates);
    manifest.detail(
        "first_event_time",
        events.first().map(|e| format_time(e.time_ms)),
    );
    manifest.detail("last_event_ms", run.last_event_ms);
    manifest.detail("last_event_time", format_time(run.last_event_ms));
    manifest.detail("train_start", start.map(format_time));
    manifest.detail("train_end", end.map(format_time));
    manifest.detail(
        "map_counts",
        json!({
            "red": categories.red.len(),
            "orange": categories.orange.len(),
            "blue": categories.blue.len(),
            "shrunk": categories.shrunk,
        }),
    );
    manifest.finished_at = now();
    manifest.write(dir)
}

fn report_json(
    report: &HindcastReport,
    args: &HindcastArgs,
    train_end_ms: i64,
    mesh_width: f64,
) -> Value {
    let per_cell: Vec<Value> = report
        .per_cell
        .iter()
        .map(|c| {
            json!({
                "rank": c.rank,
                "mesh_i": c.mesh.lat_index,
                "mesh_j": c.mesh.lon_index,
                "div": c.div,
                "match": c.class.as_str(),
                "matched_event": c.matched.map(|e| json!({
                    "time": format_time(e.time_ms),
                    "lat": e.lat,
                    "lon": e.lon,
                    "depth": e.depth_km,
                    "magnitude": e.magnitude,
                })),
            })
        })
        .collect();
    json!({
        "config": {
            "mag_threshold": args.mag_threshold,
            "horizon_days": args.horizon_days,
            "top_n_requested": args.top_n,
            "top_n": report.top_n,
            "top_n_clamped": report.top_n_clamped,
            "mesh_width": mesh_width,
            "train_end": format_time(train_end_ms),
        },
        "per_cell": per_cell,
        "precision_same_mesh": report.precision_same_mesh,
        "precision_adjacent": report.precision_adjacent,
        "recall": report.recall,
        "recall_undefined": report.recall.is_none(),
        "qualifying_event_count": report.qualifying_event_count,
    })
}

fn run_hindcast(mut args: HindcastArgs) -> Result<()> {
    let started = now();
    args.run_dir = existing(&args.run_dir)?;
    args.eval_catalog = existing(&args.eval_catalog)?;
    let out_dir = absolute(
        &args
            .out_dir
            .clone()
            .unwrap_or_else(|| args.run_dir.join("hindcast")),
    )?;
    args.out_dir = Some(out_dir.clone());

    let run_manifest_path = args.run_dir.join(manifest::FILE_NAME);
    let run_manifest = RunManifest::read(&run_manifest_path)?;
    let Command::EvolveGeo(geo) = &run_manifest.command else {
        return Err(Error::data(
            &run_manifest_path,
            "not the manifest of an evolve-geo run",
        ));
    };
    let train_end_ms = run_manifest
        .details
        .get("last_event_ms")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::data(&run_manifest_path, "missing last_event_ms"))?;

    let ranking_path = args.run_dir.join(RANKING);
    let mut manifest = RunManifest::new(Command::Hindcast(args.clone()), started);
    manifest.add_input(&run_manifest_path)?;
    manifest.add_input(&ranking_path)?;
    manifest.add_input(&args.eval_catalog)?;
    let file = File::open(&ranking_path).map_err(|e| Error::io(&ranking_path, e))?;
    let ranking: Vec<DiversityRecord<MeshId>> = read_ranking(BufReader::new(file), &ranking_path)?
        .into_iter()
        .map(|row| {
            let item = row.item.parse::<MeshId>().map_err(|_| {
                Error::data(&ranking_path, format!("`{}` is not a mesh id", row.item))
            })?;
            Ok(DiversityRecord {
                item,
                div: row.div,
                rank: row.rank,
            })
        })
        .collect::<Result<_>>()?;

    let catalog = parse_catalog(
        &args.eval_catalog,
        &CatalogOptions {
            skip_bad_rows: args.skip_bad_rows,
            min_magnitude: None,
        },
    )?;
    let params = HindcastParams {
        mag_threshold: args.mag_threshold,
        horizon_ms: args.horizon_days.saturating_mul(MILLIS_PER_DAY),
        top_n: args.top_n,
        mesh_width: geo.mesh_width,
        train_end_ms,
    };
    let report = hindcast(&ranking, &catalog.events, &params)?;
    if report.top_n_clamped {
        log::warn!(
            "--top-n {} clamped to the {} ranked meshes",
            args.top_n,
            report.top_n
        );
    }
    if report.recall.is_none() {
        log::warn!("no evaluation event qualifies; recall is undefined");
    }

    create_dir(&out_dir)?;
    let value = report_json(&report, &args, train_end_ms, geo.mesh_width);
    write_file(&out_dir, HINDCAST, |w| {
        serde_json::to_writer_pretty(&mut *w, &value)?;
        w.write_all(b"\n")
    })?;
    manifest.outputs.push(HINDCAST.into());
    manifest.item_count = report.top_n;
    manifest.detail("qualifying_event_count", report.qualifying_event_count);
    manifest.finished_at = now();
    manifest.write(&out_dir)
}

fn rank(mut args: RankArgs) -> Result<()> {
    let started = now();
    args.snapshot = existing(&args.snapshot)?;
    args.out_dir = absolute(&args.out_dir)?;
    let mut manifest = RunManifest::new(Command::Rank(args.clone()), started);
    manifest.add_input(&args.snapshot)?;
    let file = File::open(&args.snapshot).map_err(|e| Error::io(&args.snapshot, e))?;
    let snapshot = read_snapshot(BufReader::new(file), &args.snapshot)?;
    let pop = snapshot.into_population(&EvolutionConfig::default())?;
    let ranking = rank_by_diversity(&pop);
    create_dir(&args.out_dir)?;
    write_file(&args.out_dir, RANKING, |w| write_ranking(w, &ranking))?;
    manifest.outputs.push(RANKING.into());
    manifest.item_count = pop.len();
    manifest.finished_at = now();
    manifest.write(&args.out_dir)
}

fn smooth(mut args: SmoothArgs) -> Result<()> {
    let started = now();
    if args.window == 0 {
        return Err(Error::Usage("--window must be at least 1".into()));
    }
    args.ranking = existing(&args.ranking)?;
    args.labels = existing(&args.labels)?;
    args.out_dir = absolute(&args.out_dir)?;
    let mut manifest = RunManifest::new(Command::Smooth(args.clone()), started);
    manifest.add_input(&args.ranking)?;
    manifest.add_input(&args.labels)?;

    let open = |p: &Path| {
        File::open(p)
            .map(BufReader::new)
            .map_err(|e| Error::io(p, e))
    };
    let ranking = read_ranking(open(&args.ranking)?, &args.ranking)?;
    let labels = read_labels(open(&args.labels)?, &args.labels)?;
    let missing: Vec<&str> = ranking
        .iter()
        .filter(|r| !labels.contains_key(&r.item))
        .map(|r| r.item.as_str())
        .collect();
    if !missing.is_empty() {
        match args.missing_labels {
            MissingLabelsArg::Error => {
                let shown: Vec<&str> = missing.iter().take(20).copied().collect();
                return Err(Error::data(
                    &args.labels,
                    format!(
                        "{} ranked item(s) have no label: {}",
                        missing.len(),
                        shown.join(", ")
                    ),
                ));
            }
            MissingLabelsArg::ZeroFill => {
                log::warn!("{} item(s) without label scored 0", missing.len())
            }
        }
    }
    let flags: Vec<bool> = ranking
        .iter()
        .map(|r| labels.get(&r.item).copied().unwrap_or(false))
        .collect();
    let smoothed = smooth_scores(&flags, args.window);
    let rows: Vec<SmoothedRow> = ranking
        .iter()
        .zip(&flags)
        .zip(&smoothed)
        .map(|((r, &label), &s)| SmoothedRow {
            rank: r.rank,
            item: r.item.clone(),
            label,
            smoothed: s,
        })
        .collect();
    create_dir(&args.out_dir)?;
    write_file(&args.out_dir, SMOOTHED, |w| write_smoothed(w, &rows))?;
    manifest.outputs.push(SMOOTHED.into());
    manifest.item_count = rows.len();
    manifest.detail("missing_labels", missing.len());
    manifest.finished_at = now();
    manifest.write(&args.out_dir)
}

fn rerun(args: RerunArgs) -> Result<()> {
    let recorded = RunManifest::read(&args.manifest)?;
    recorded.verify_inputs()?;
    let mut command = recorded.command;
    if let Some(out) = args.out_dir {
        match &mut command {
            Command::EvolveText(a) => a.out_dir = out,
            Command::EvolveGeo(a) => a.out_dir = out,
            Command::Hindcast(a) => a.out_dir = Some(out),
            Command::Rank(a) => a.out_dir = out,
            Command::Smooth(a) => a.out_dir = out,
            Command::Rerun(_) => {}
        }
    }
    if matches!(command, Command::Rerun(_)) {
        return Err(Error::data(
            &args.manifest,
            "manifest records a rerun, not a run",
        ));
    }
    run(command)
}
