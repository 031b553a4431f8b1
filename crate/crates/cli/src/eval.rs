//! Top-k precision of query output against synthetic ground truth.
//!
//! A result is a true match when one of its region tiles overlaps the
//! visible part of a placement on the same image whose label the query
//! carries. Tile `(row, col)` of an image `H` pixels high covers
//! `x in [col*ts, (col+1)*ts)` and `y in [H-(row+1)*ts, H-row*ts)`, row 0
//! being the bottom tile row.

use std::collections::BTreeMap;

use crate::error::{CliError, CliResult};
use crate::records::ResultRecord;
use crate::synthetic::{GroundTruth, Placement};

#[derive(Debug, Clone, PartialEq)]
pub struct QueryPrecision {
    pub query: String,
    pub true_matches: usize,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionReport {
    pub k: usize,
    pub per_query: Vec<QueryPrecision>,
    pub mean: f64,
}

fn file_name(path: &str) -> &str {
    path.rsplit(['/', '\\']).next().unwrap_or(path)
}

/// Placements on the result's image that its region overlaps.
pub fn overlapped_placements<'a>(rec: &ResultRecord, truth: &'a GroundTruth) -> CliResult<Vec<&'a Placement>> {
    let image = truth
        .image(file_name(&rec.image_path))
        .ok_or_else(|| CliError::Data(format!("image {:?} is not in the ground truth", rec.image_path)))?;
    let ts = truth.tile_size as i64;
    let h = image.height as i64;
    Ok(image
        .placements
        .iter()
        .filter(|p| p.visible.w > 0 && p.visible.h > 0)
        .filter(|p| {
            rec.cells.iter().any(|&[row, col]| {
                let (row, col) = (row as i64, col as i64);
                p.visible.intersects(col * ts, h - (row + 1) * ts, (col + 1) * ts, h - row * ts)
            })
        })
        .collect())
}

pub fn is_true_match(rec: &ResultRecord, truth: &GroundTruth) -> CliResult<bool> {
    let query = truth
        .query(file_name(&rec.query))
        .ok_or_else(|| CliError::Data(format!("query {:?} is not in the ground truth", rec.query)))?;
    Ok(overlapped_placements(rec, truth)?
        .iter()
        .any(|p| query.labels.contains(&p.label)))
}

/// Precision over the first `k` ranks of every query present in `results`.
/// Missing ranks count as false.
pub fn eval_precision(results: &[ResultRecord], truth: &GroundTruth, k: usize) -> CliResult<PrecisionReport> {
    if k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let mut by_query: BTreeMap<&str, Vec<&ResultRecord>> = BTreeMap::new();
    for r in results {
        by_query.entry(r.query.as_str()).or_default().push(r);
    }
    if by_query.is_empty() {
        return Err(CliError::Data("no result records to evaluate".into()));
    }
    let mut per_query = Vec::with_capacity(by_query.len());
    for (query, mut recs) in by_query {
        recs.sort_by_key(|r| r.rank);
        let mut true_matches = 0;
        for r in recs.iter().take_while(|r| r.rank <= k) {
            if is_true_match(r, truth)? {
                true_matches += 1;
            }
        }
        per_query.push(QueryPrecision {
            query: query.to_string(),
            true_matches,
            precision: true_matches as f64 / k as f64,
        });
    }
    let mean = per_query.iter().map(|q| q.precision).sum::<f64>() / per_query.len() as f64;
    Ok(PrecisionReport { k, per_query, mean })
}
