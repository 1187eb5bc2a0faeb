//! CSV tables: rankings (`rank,item,div`), labels (`item,label`) and
//! smoothed scores (`rank,item,label,smoothed`).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::{Read, Write};
use std::path::Path;

use semcell_core::DiversityRecord;

use crate::error::{Error, Result};
use crate::fmt::{shortest, sig6};

/// One row read back from a ranking file.
#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub rank: usize,
    pub item: String,
    pub div: f64,
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_ranking<W: Write, K: Display>(
    out: W,
    records: &[DiversityRecord<K>],
) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(["rank", "item", "div"])?;
    for r in records {
        w.write_record([r.rank.to_string(), r.item.to_string(), sig6(r.div)])?;
    }
    w.flush()
}

fn check_header(rdr: &mut csv::Reader<impl Read>, path: &Path, expected: &[&str]) -> Result<()> {
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::parse(
            path,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    Ok(())
}

fn records<'a, R: Read>(
    rdr: &'a mut csv::Reader<R>,
    path: &Path,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + 'a {
    let path = path.to_path_buf();
    rdr.records().map(move |r| {
        r.map(|rec| (rec.position().map_or(0, |p| p.line()), rec))
            .map_err(|e| Error::parse(&path, e.position().map_or(0, |p| p.line()), e.to_string()))
    })
}

pub fn read_ranking<R: Read>(input: R, path: &Path) -> Result<Vec<RankRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, path, &["rank", "item", "div"])?;
    let mut rows = Vec::new();
    for rec in records(&mut rdr, path) {
        let (line, rec) = rec?;
        let rank = rec[0]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad rank {:?}", &rec[0])))?;
        let div = rec[2]
            .parse::<f64>()
            .ok()
            .filter(|d| d.is_finite() && *d >= 0.0)
            .ok_or_else(|| Error::parse(path, line, format!("bad div {:?}", &rec[2])))?;
        if rank != rows.len() + 1 {
            return Err(Error::parse(
                path,
                line,
                format!("rank {rank} out of sequence"),
            ));
        }
        rows.push(RankRow {
            rank,
            item: rec[1].to_string(),
            div,
        });
    }
    Ok(rows)
}

pub fn read_labels<R: Read>(input: R, path: &Path) -> Result<BTreeMap<String, bool>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, path, &["item", "label"])?;
    let mut labels = BTreeMap::new();
    for rec in records(&mut rdr, path) {
        let (line, rec) = rec?;
        let label = match rec[1].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::parse(
                    path,
                    line,
                    format!("label must be 0 or 1, found {other:?}"),
                ))
            }
        };
        labels.insert(rec[0].to_string(), label);
    }
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedRow {
    pub rank: usize,
    pub item: String,
    pub label: bool,
    pub smoothed: f64,
}

pub fn write_smoothed<W: Write>(out: W, rows: &[SmoothedRow]) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(["rank", "item", "label", "smoothed"])?;
    for r in rows {
        w.write_record([
            r.rank.to_string(),
            r.item.clone(),
            u8::from(r.label).to_string(),
            shortest(r.smoothed),
        ])?;
    }
    w.flush()
}
