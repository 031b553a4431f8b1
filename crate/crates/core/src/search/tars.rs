use std::time::Instant;

use crate::error::Result;
use crate::index::{Catalog, NnCursor, SpatialIndex};
use crate::model::QueryImage;
use crate::scoring::{tars_threshold_matrix, upper_bound};

use super::alignments::{get_max_sub_rg, ExploredSet};
use super::queue::ResultQueue;
use super::{check_index, BoundRecord, SearchConfig, SearchOutcome, SearchStats};

/// Threshold search with one nearest-neighbour cursor per query tile.
///
/// Each round advances every cursor once, scores the alignments of the
/// fetched tiles, then bounds all unexplored alignments by the threshold
/// matrix of the latest per-tile distances. An exhausted cursor keeps its
/// last distance. Stops once the queue is full and the threshold is below
/// its head, or when every cursor is exhausted.
pub fn tars(
    query: &QueryImage,
    index: &SpatialIndex,
    catalog: &Catalog,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    check_index(query, index, config)?;
    let start = Instant::now();
    let n = query.len();
    let mut cursors: Vec<NnCursor<'_>> = query
        .tiles()
        .iter()
        .map(|q| index.cursor(q.features.as_slice()))
        .collect::<Result<_>>()?;
    let mut distances = vec![0.0; n];
    let mut rq = ResultQueue::new(config.k)?;
    let mut explored = ExploredSet::new();
    let mut stats = SearchStats::default();
    let mut threshold = f64::INFINITY;
    let mut fetched = Vec::with_capacity(n);

    loop {
        fetched.clear();
        let t0 = Instant::now();
        for (i, cursor) in cursors.iter_mut().enumerate() {
            if let Some((entry, d)) = cursor.next() {
                distances[i] = d;
                fetched.push((i, entry));
            }
        }
        stats.nn_time += t0.elapsed();
        if fetched.is_empty() {
            break;
        }
        stats.rounds += 1;

        let t0 = Instant::now();
        for &(i, entry) in &fetched {
            if let Some(m) = get_max_sub_rg(entry, query.position(i), query, catalog, config, &mut explored)? {
                stats.alignments_evaluated += 1;
                stats.bound_audit.push(BoundRecord {
                    alignment: m.alignment,
                    score: m.score,
                    bound: threshold,
                });
                rq.insert(m);
            }
        }
        threshold = upper_bound(&tars_threshold_matrix(query, &distances, &config.params)?, config.mode);
        stats.dp_time += t0.elapsed();
        stats.thresholds.push(threshold);
        if rq.is_full() && threshold < rq.threshold() {
            break;
        }
    }

    for c in &cursors {
        stats.nn_ops += c.distance_evals();
        stats.cursor_pops += c.pops();
    }
    stats.total_time = start.elapsed();
    Ok(SearchOutcome {
        matches: rq.into_sorted(),
        stats,
    })
}
