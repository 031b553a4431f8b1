use std::time::Duration;

use crate::model::Alignment;

/// An evaluated alignment with the bound that was in force when it was found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRecord {
    pub alignment: Alignment,
    pub score: f64,
    pub bound: f64,
}

/// Counters and timings of one query execution.
#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    /// Alignments scored with the DP.
    pub alignments_evaluated: usize,
    /// Point and box distance computations against the index.
    pub nn_ops: usize,
    /// Heap pops across all TARS cursors.
    pub cursor_pops: usize,
    /// Entities popped from the SPARS candidate queue.
    pub bq_pops: usize,
    /// TARS rounds.
    pub rounds: usize,
    pub nn_time: Duration,
    /// Alignment scoring plus the DP runs on bound and threshold matrices.
    pub dp_time: Duration,
    pub total_time: Duration,
    /// TARS threshold after each round.
    pub thresholds: Vec<f64>,
    /// SPARS bounds in pop order.
    pub popped_bounds: Vec<f64>,
    pub bound_audit: Vec<BoundRecord>,
}

impl SearchStats {
    /// Share of the total time spent in index traversal.
    pub fn nn_share(&self) -> f64 {
        share(self.nn_time, self.total_time)
    }

    /// Share of the total time spent scoring alignments.
    pub fn dp_share(&self) -> f64 {
        share(self.dp_time, self.total_time)
    }

    /// Audited alignments whose score exceeds their bound.
    pub fn bound_violations(&self) -> impl Iterator<Item = &BoundRecord> {
        self.bound_audit.iter().filter(|r| r.score > r.bound)
    }
}

fn share(part: Duration, total: Duration) -> f64 {
    if total.is_zero() {
        0.0
    } else {
        (part.as_secs_f64() / total.as_secs_f64()).min(1.0)
    }
}
