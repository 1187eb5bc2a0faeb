//! Population snapshots: a header line `semcell-snapshot v1 g=<g> d=<d>`
//! followed by one `<item>\t<j>\t<gene> ... <gene>` line per chromosome.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use semcell_core::{
    validate_item_id, CellPopulation, Chromosome, EvolutionConfig, ItemKey, SemanticCell,
};

use crate::error::{Error, Result};
use crate::fmt::shortest;

const MAGIC: &str = "semcell-snapshot v1";

pub fn write_snapshot<K: ItemKey, W: Write>(
    out: &mut W,
    pop: &CellPopulation<K>,
) -> std::io::Result<()> {
    let cfg = pop.config();
    writeln!(out, "{MAGIC} g={} d={}", cfg.g, cfg.dim)?;
    let mut line = String::new();
    for cell in pop.iter() {
        for (j, c) in cell.chromosomes().iter().enumerate() {
            line.clear();
            line.push_str(&cell.item().to_string());
            line.push('\t');
            line.push_str(&j.to_string());
            line.push('\t');
            for (k, gene) in c.genes().iter().enumerate() {
                if k > 0 {
                    line.push(' ');
                }
                line.push_str(&shortest(*gene));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

/// A parsed snapshot with string item ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub g: usize,
    pub dim: usize,
    pub cells: BTreeMap<String, Vec<Vec<f64>>>,
}

impl Snapshot {
    /// Rebuilds a population; `g` and `dim` of `config` are taken from the snapshot.
    pub fn into_population(self, config: &EvolutionConfig) -> Result<CellPopulation<String>> {
        let cfg = EvolutionConfig {
            g: self.g,
            dim: self.dim,
            ..config.clone()
        };
        let mut pop = CellPopulation::new(cfg);
        for (item, chromosomes) in self.cells {
            let chromosomes = chromosomes
                .into_iter()
                .map(Chromosome::new)
                .collect::<semcell_core::Result<Vec<_>>>()?;
            pop.insert(SemanticCell::new(item, chromosomes)?)?;
        }
        Ok(pop)
    }
}

pub fn read_snapshot<R: BufRead>(reader: R, path: &Path) -> Result<Snapshot> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty snapshot"))?
        .map_err(|e| Error::io(path, e))?;
    let (g, dim) = parse_header(&header).ok_or_else(|| {
        Error::parse(
            path,
            1,
            format!("expected `{MAGIC} g=<g> d=<d>`, found {header:?}"),
        )
    })?;
    let mut cells: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx as u64 + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(item), Some(j), Some(genes), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::parse(
                path,
                lineno,
                "expected three tab-separated fields",
            ));
        };
        validate_item_id(item).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let j: usize = j
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad chromosome index {j:?}")))?;
        let genes = genes
            .split(' ')
            .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::parse(path, lineno, "bad gene value"))?;
        if genes.len() != dim {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {dim} genes, found {}", genes.len()),
            ));
        }
        let entry = cells.entry(item.to_string()).or_default();
        if j != entry.len() {
            return Err(Error::parse(
                path,
                lineno,
                format!(
                    "chromosome {j} of `{item}` out of order (expected {})",
                    entry.len()
                ),
            ));
        }
        if j >= g {
            return Err(Error::parse(
                path,
                lineno,
                format!("chromosome index {j} >= g = {g}"),
            ));
        }
        entry.push(genes);
    }
    if let Some((item, cs)) = cells.iter().find(|(_, cs)| cs.len() != g) {
        return Err(Error::data(
            path,
            format!("`{item}` has {} chromosomes, expected {g}", cs.len()),
        ));
    }
    Ok(Snapshot { g, dim, cells })
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.strip_prefix(MAGIC)?.strip_prefix(' ')?;
    let (g, d) = rest.split_once(' ')?;
    let g = g.strip_prefix("g=")?.parse().ok()?;
    let d = d.strip_prefix("d=")?.parse().ok()?;
    (g > 0 && d > 0).then_some((g, d))
}
