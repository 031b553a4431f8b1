//! Line-delimited JSON query output. Every record is one line with a fixed
//! key order; `record` names its kind.

use std::io::Write;

use serde::{Deserialize, Serialize};
use subregion::search::{Algorithm, SearchConfig, SearchOutcome};

use crate::error::{CliError, CliResult};
use crate::persist::IndexFile;

#[derive(Debug, Clone, Serialize)]
pub struct HeaderRecord<'a> {
    pub record: &'static str,
    pub query: &'a str,
    pub index: &'a str,
    pub algorithm: &'static str,
    pub mode: &'static str,
    pub metric: &'static str,
    pub k: usize,
    pub lambda: f64,
    pub c: f64,
    pub tile_size: u32,
    pub dim: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub record: String,
    pub query: String,
    pub rank: usize,
    pub image_id: usize,
    pub image_path: String,
    pub drow: i64,
    pub dcol: i64,
    pub score: f64,
    /// Region cells as image tile `[row, col]`, row 0 at the bottom.
    pub cells: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRecord<'a> {
    pub record: &'static str,
    pub query: &'a str,
    pub results: usize,
    pub alignments_evaluated: usize,
    pub nn_ops: usize,
    pub cursor_pops: usize,
    pub bq_pops: usize,
    pub rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub nn_ms: f64,
    pub dp_ms: f64,
}

fn line<T: Serialize>(out: &mut impl Write, rec: &T) -> CliResult<()> {
    let s = serde_json::to_string(rec).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(out, "{s}").map_err(|e| CliError::io("<output>", e))
}

pub struct QueryRun<'a> {
    pub query: &'a str,
    pub index_path: &'a str,
    pub algorithm: Algorithm,
    pub config: &'a SearchConfig,
    pub outcome: &'a SearchOutcome,
    pub with_timing: bool,
}

pub fn write_query_records(out: &mut impl Write, index: &IndexFile, run: &QueryRun<'_>) -> CliResult<()> {
    let cfg = run.config;
    line(
        out,
        &HeaderRecord {
            record: "header",
            query: run.query,
            index: run.index_path,
            algorithm: run.algorithm.name(),
            mode: cfg.mode.name(),
            metric: cfg.metric.name(),
            k: cfg.k,
            lambda: cfg.params.lambda,
            c: cfg.params.c,
            tile_size: index.header.tile_size,
            dim: index.header.reduced_dim,
        },
    )?;
    for (rank, m) in run.outcome.matches.iter().enumerate() {
        let image = index
            .catalog
            .image(m.alignment.image_id)
            .ok_or_else(|| CliError::Data(format!("result refers to missing image {}", m.alignment.image_id)))?;
        line(
            out,
            &ResultRecord {
                record: "result".into(),
                query: run.query.into(),
                rank: rank + 1,
                image_id: image.id,
                image_path: image.path.clone(),
                drow: m.alignment.drow,
                dcol: m.alignment.dcol,
                score: m.score,
                cells: m.image_cells().into_iter().map(|(r, c)| [r, c]).collect(),
            },
        )?;
    }
    let s = &run.outcome.stats;
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    line(
        out,
        &SummaryRecord {
            record: "summary",
            query: run.query,
            results: run.outcome.matches.len(),
            alignments_evaluated: s.alignments_evaluated,
            nn_ops: s.nn_ops,
            cursor_pops: s.cursor_pops,
            bq_pops: s.bq_pops,
            rounds: s.rounds,
            timing: run.with_timing.then(|| Timing {
                total_ms: ms(s.total_time),
                nn_ms: ms(s.nn_time),
                dp_ms: ms(s.dp_time),
            }),
        },
    )
}

/// Result records of a query output stream; other records are skipped.
pub fn parse_results(text: &str) -> CliResult<Vec<ResultRecord>> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: serde_json::Value =
            serde_json::from_str(l).map_err(|e| CliError::Data(format!("line {}: {e}", i + 1)))?;
        if v.get("record").and_then(|r| r.as_str()) == Some("result") {
            out.push(serde_json::from_value(v).map_err(|e| CliError::Data(format!("line {}: {e}", i + 1)))?);
        }
    }
    Ok(out)
}
