use std::io::Write;

use semcell_core::{Chromosome, ItemKey, TraceEntry};

use crate::fmt::shortest;

fn genes(c: &Chromosome) -> String {
    c.genes()
        .iter()
        .map(|g| shortest(*g))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes `trace.tsv`: one line per update, genes space-separated within a column.
pub fn write_trace<W: Write, K: ItemKey>(
    out: &mut W,
    trace: &[TraceEntry<K>],
) -> std::io::Result<()> {
    writeln!(out, "round\tunit_id\titem\tselected\tcentroid\tpre\tpost")?;
    for t in trace {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.round,
            t.unit_id,
            t.item,
            t.selected,
            genes(&t.centroid),
            genes(&t.pre),
            genes(&t.post)
        )?;
    }
    Ok(())
}
