use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Result};
use crate::model::RankedMatch;

/// Final result order: score descending, then image id, row offset and
/// column offset ascending.
pub fn result_order(a: &RankedMatch, b: &RankedMatch) -> Ordering {
    b.score.total_cmp(&a.score).then(a.alignment.cmp(&b.alignment))
}

#[derive(Debug, Clone)]
struct HeadFirst(RankedMatch);

impl PartialEq for HeadFirst {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeadFirst {}

impl PartialOrd for HeadFirst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeadFirst {
    // The heap top is the lowest score, the last in result order among ties.
    fn cmp(&self, other: &Self) -> Ordering {
        result_order(&self.0, &other.0)
    }
}

/// Bounded top-k queue whose head is its minimum-score member.
#[derive(Debug, Clone)]
pub struct ResultQueue {
    k: usize,
    heap: BinaryHeap<HeadFirst>,
}

impl ResultQueue {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("result queue capacity must be at least 1");
        }
        Ok(Self {
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        })
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.heap.len() >= self.k
    }

    pub fn head(&self) -> Option<&RankedMatch> {
        self.heap.peek().map(|h| &h.0)
    }

    /// Head score, or negative infinity while the queue is not full.
    pub fn threshold(&self) -> f64 {
        if self.is_full() {
            self.heap.peek().map_or(f64::NEG_INFINITY, |h| h.0.score)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Below capacity every match is kept; at capacity a match replaces the
    /// head iff its score is at least the head score. Returns whether `e`
    /// was kept.
    pub fn insert(&mut self, e: RankedMatch) -> bool {
        if self.heap.len() < self.k {
            self.heap.push(HeadFirst(e));
            return true;
        }
        let head = self.heap.peek().expect("full queue").0.score;
        if head <= e.score {
            self.heap.pop();
            self.heap.push(HeadFirst(e));
            true
        } else {
            false
        }
    }

    /// Members in result order.
    pub fn into_sorted(self) -> Vec<RankedMatch> {
        let mut v: Vec<RankedMatch> = self.heap.into_iter().map(|h| h.0).collect();
        v.sort_by(result_order);
        v
    }
}

/// Free-function form of [`ResultQueue::insert`].
pub fn rq_insert(rq: &mut ResultQueue, e: RankedMatch) -> bool {
    rq.insert(e)
}
