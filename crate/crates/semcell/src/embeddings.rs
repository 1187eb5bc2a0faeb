//! Word-embedding text files: a `<vocab_count> <dim>` header, then one
//! `<token> <v1> ... <vdim>` row per line.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use semcell_core::text::EmbeddingTable;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedEmbeddings {
    pub table: EmbeddingTable,
    /// Vocabulary size announced by the header.
    pub declared_rows: usize,
    /// Rows read, duplicates included.
    pub rows: usize,
    /// Rows whose token had already appeared; the later row wins.
    pub duplicates: usize,
}

pub fn load_embeddings(path: &Path) -> Result<LoadedEmbeddings> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let loaded = parse_embeddings(BufReader::new(file), path)?;
    if loaded.duplicates > 0 {
        log::warn!(
            "{}: {} duplicate token row(s), last one kept",
            path.display(),
            loaded.duplicates
        );
    }
    if loaded.rows != loaded.declared_rows {
        log::warn!(
            "{}: header announces {} rows, file has {}",
            path.display(),
            loaded.declared_rows,
            loaded.rows
        );
    }
    Ok(loaded)
}

pub fn parse_embeddings<R: BufRead>(reader: R, path: &Path) -> Result<LoadedEmbeddings> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing header"))?
        .map_err(|e| Error::io(path, e))?;
    let fields: Vec<&str> = header.split_ascii_whitespace().collect();
    let [count, dim] = fields.as_slice() else {
        return Err(Error::parse(
            path,
            1,
            "header must be `<vocab_count> <dim>`",
        ));
    };
    let declared_rows: usize = count
        .parse()
        .map_err(|_| Error::parse(path, 1, format!("bad vocabulary count {count:?}")))?;
    let dim: usize = dim
        .parse()
        .ok()
        .filter(|d| *d > 0)
        .ok_or_else(|| Error::parse(path, 1, format!("bad dimension {dim:?}")))?;

    let mut table = EmbeddingTable::new(dim);
    let mut rows = 0;
    let mut duplicates = 0;
    for (idx, line) in lines.enumerate() {
        let lineno = idx as u64 + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        let token = parts.next().unwrap_or_default();
        let values = parts
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(path, lineno, format!("bad value {v:?}")))
                    .and_then(|x| {
                        if x.is_finite() {
                            Ok(x)
                        } else {
                            Err(Error::parse(
                                path,
                                lineno,
                                format!("non-finite value {v:?}"),
                            ))
                        }
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != dim {
            return Err(Error::parse(
                path,
                lineno,
                format!(
                    "expected {dim} values for `{token}`, found {}",
                    values.len()
                ),
            ));
        }
        let replaced = table
            .insert(token.to_string(), values)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        rows += 1;
        duplicates += usize::from(replaced);
    }
    Ok(LoadedEmbeddings {
        table,
        declared_rows,
        rows,
        duplicates,
    })
}
