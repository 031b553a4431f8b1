use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::Result;
use crate::index::{Catalog, NodeKind, SpatialIndex};
use crate::model::{QueryImage, RankedMatch};
use crate::mwcs::dp_max_region;
use crate::scoring::{safe_positive_sum, score_matrix_uniform, BoundMode};

use super::alignments::{align_from_pair, get_max_sub_rg, ExploredSet};
use super::queue::ResultQueue;
use super::{check_index, BoundRecord, SearchConfig, SearchOutcome, SearchStats};

#[derive(Debug, Clone, Copy)]
enum Entity {
    Node(usize),
    /// A leaf entry waiting to be paired with query tile `query_tile`.
    Deferred { entry: usize, query_tile: usize },
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    bound: f64,
    seq: u64,
    entity: Entity,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Highest bound first, first pushed first among equal bounds.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then(other.seq.cmp(&self.seq))
    }
}

struct Run<'a> {
    query: &'a QueryImage,
    index: &'a SpatialIndex,
    catalog: &'a Catalog,
    config: &'a SearchConfig,
    bq: BinaryHeap<Candidate>,
    seq: u64,
    rq: ResultQueue,
    explored: ExploredSet,
    stats: SearchStats,
}

impl Run<'_> {
    fn push(&mut self, bound: f64, entity: Entity) {
        self.bq.push(Candidate {
            bound,
            seq: self.seq,
            entity,
        });
        self.seq += 1;
    }

    /// Bound of the uniform matrix at `d`, or `None` when the candidate can
    /// never be popped: the positive sum is below the queue threshold, and
    /// neither the DP score nor later thresholds can cross it.
    fn uniform_bound(&mut self, d: f64) -> Result<Option<f64>> {
        let t0 = Instant::now();
        let m = score_matrix_uniform(self.query, d, &self.config.params)?;
        let safe = safe_positive_sum(m.scores());
        let bound = if safe < self.rq.threshold() {
            None
        } else {
            Some(match self.config.mode {
                BoundMode::SafePositiveSum => safe,
                BoundMode::PaperDp => dp_max_region(&m).score,
            })
        };
        self.stats.dp_time += t0.elapsed();
        Ok(bound)
    }

    fn offer(&mut self, m: Option<RankedMatch>, bound: f64) {
        if let Some(m) = m {
            self.stats.alignments_evaluated += 1;
            self.stats.bound_audit.push(BoundRecord {
                alignment: m.alignment,
                score: m.score,
                bound,
            });
            self.rq.insert(m);
        }
    }

    fn evaluate(&mut self, entry: usize, query_tile: usize, bound: f64) -> Result<()> {
        let t0 = Instant::now();
        let m = get_max_sub_rg(
            self.index.entry(entry),
            self.query.position(query_tile),
            self.query,
            self.catalog,
            self.config,
            &mut self.explored,
        )?;
        self.stats.dp_time += t0.elapsed();
        self.offer(m, bound);
        Ok(())
    }

    fn expand_internal(&mut self, children: &[usize]) -> Result<()> {
        let metric = self.index.metric();
        for &c in children {
            let t0 = Instant::now();
            let mbr = self.index.node(c).mbr();
            let d_min = self
                .query
                .tiles()
                .iter()
                .map(|q| mbr.mindist_unchecked(q.features.as_slice(), metric))
                .fold(f64::INFINITY, f64::min);
            self.stats.nn_ops += self.query.len();
            self.stats.nn_time += t0.elapsed();
            if let Some(bound) = self.uniform_bound(d_min)? {
                self.push(bound, Entity::Node(c));
            }
        }
        Ok(())
    }

    fn expand_leaf(&mut self, entries: &[usize], bound: f64) -> Result<()> {
        let metric = self.index.metric();
        for &e in entries {
            let t0 = Instant::now();
            let features = self.index.entry(e).features.as_slice();
            let distances: Vec<f64> = self
                .query
                .tiles()
                .iter()
                .map(|q| metric.distance(q.features.as_slice(), features))
                .collect();
            self.stats.nn_ops += distances.len();
            self.stats.nn_time += t0.elapsed();
            let nearest = (0..distances.len())
                .min_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)))
                .expect("non-empty query");
            self.evaluate(e, nearest, bound)?;
            let tile = self.index.entry(e).tile;
            for (i, &d) in distances.iter().enumerate() {
                if i == nearest || self.explored.contains(&align_from_pair(self.query.position(i), tile)) {
                    continue;
                }
                if let Some(b) = self.uniform_bound(d)? {
                    self.push(
                        b,
                        Entity::Deferred {
                            entry: e,
                            query_tile: i,
                        },
                    );
                }
            }
        }
        Ok(())
    }
}

/// Single best-first pass over the index.
///
/// Nodes are bounded by the uniform matrix at the smallest box distance from
/// any query tile. A leaf entry is scored at once against its nearest query
/// tile; its pairings with the other query tiles wait in the queue, bounded
/// by the uniform matrix at their exact distance. Stops once the result
/// queue is full and the best pending bound is below its head.
pub fn spars(
    query: &QueryImage,
    index: &SpatialIndex,
    catalog: &Catalog,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    check_index(query, index, config)?;
    let start = Instant::now();
    let mut run = Run {
        query,
        index,
        catalog,
        config,
        bq: BinaryHeap::new(),
        seq: 0,
        rq: ResultQueue::new(config.k)?,
        explored: ExploredSet::new(),
        stats: SearchStats::default(),
    };
    run.push(f64::INFINITY, Entity::Node(index.root()));

    while let Some(&top) = run.bq.peek() {
        if run.rq.is_full() && top.bound < run.rq.threshold() {
            break;
        }
        run.bq.pop();
        run.stats.bq_pops += 1;
        run.stats.popped_bounds.push(top.bound);
        match top.entity {
            Entity::Node(n) => match index.node(n).kind() {
                NodeKind::Internal(children) => run.expand_internal(children)?,
                NodeKind::Leaf(entries) => run.expand_leaf(entries, top.bound)?,
            },
            Entity::Deferred { entry, query_tile } => run.evaluate(entry, query_tile, top.bound)?,
        }
    }

    let mut stats = run.stats;
    stats.total_time = start.elapsed();
    Ok(SearchOutcome {
        matches: run.rq.into_sorted(),
        stats,
    })
}
