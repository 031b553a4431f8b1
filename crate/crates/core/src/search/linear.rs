use std::time::Instant;

use crate::error::{Error, Result};
use crate::index::Catalog;
use crate::model::QueryImage;

use super::alignments::{enumerate_alignments, evaluate_alignment};
use super::queue::ResultQueue;
use super::{check_config, SearchConfig, SearchOutcome, SearchStats};

/// Scores every alignment of the query over every image.
pub fn linear_search(query: &QueryImage, catalog: &Catalog, config: &SearchConfig) -> Result<SearchOutcome> {
    check_config(config)?;
    let start = Instant::now();
    let mut rq = ResultQueue::new(config.k)?;
    let mut stats = SearchStats::default();
    for image in catalog.images() {
        if image.dim() != query.dim() {
            return Err(Error::DimensionMismatch {
                expected: image.dim(),
                found: query.dim(),
            });
        }
        for alignment in enumerate_alignments(query, image) {
            let m = evaluate_alignment(query, image, alignment, config)?;
            stats.alignments_evaluated += 1;
            rq.insert(m);
        }
    }
    stats.total_time = start.elapsed();
    stats.dp_time = stats.total_time;
    Ok(SearchOutcome {
        matches: rq.into_sorted(),
        stats,
    })
}
