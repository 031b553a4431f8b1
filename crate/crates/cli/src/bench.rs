//! Per-query timing and counter table for the three strategies, as CSV.

use std::io::Write;

use subregion::search::{run, Algorithm, SearchConfig};
use subregion::QueryImage;

use crate::error::{CliError, CliResult};
use crate::persist::IndexFile;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub query: String,
    pub query_tiles: usize,
    pub wall_ms: f64,
    pub nn_share: f64,
    pub dp_share: f64,
    pub alignments: usize,
    pub nn_ops: usize,
    pub cursor_pops: usize,
    pub bq_pops: usize,
}

pub const CSV_HEADER: &str =
    "algorithm,query,query_tiles,wall_ms,nn_share,dp_share,alignments,nn_ops,cursor_pops,bq_pops";

/// Runs every algorithm on every query, sequentially.
pub fn bench(
    index: &IndexFile,
    queries: &[(String, QueryImage)],
    config: &SearchConfig,
    algorithms: &[Algorithm],
) -> CliResult<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(queries.len() * algorithms.len());
    for &algorithm in algorithms {
        for (name, q) in queries {
            let out = run(algorithm, q, &index.index, &index.catalog, config)?;
            let s = &out.stats;
            rows.push(BenchRow {
                algorithm,
                query: name.clone(),
                query_tiles: q.len(),
                wall_ms: s.total_time.as_secs_f64() * 1e3,
                nn_share: s.nn_share(),
                dp_share: s.dp_share(),
                alignments: s.alignments_evaluated,
                nn_ops: s.nn_ops,
                cursor_pops: s.cursor_pops,
                bq_pops: s.bq_pops,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv(out: &mut impl Write, rows: &[BenchRow]) -> CliResult<()> {
    let io = |e| CliError::io("<output>", e);
    writeln!(out, "{CSV_HEADER}").map_err(io)?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.3},{:.4},{:.4},{},{},{},{}",
            r.algorithm.name(),
            r.query.replace(',', "_"),
            r.query_tiles,
            r.wall_ms,
            r.nn_share,
            r.dp_share,
            r.alignments,
            r.nn_ops,
            r.cursor_pops,
            r.bq_pops
        )
        .map_err(io)?;
    }
    Ok(())
}
