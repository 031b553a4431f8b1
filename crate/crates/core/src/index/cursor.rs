use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::tree::{LeafEntry, NodeKind, SpatialIndex};
use crate::error::{Error, Result};
use crate::model::TileRef;

#[derive(Debug, Clone, Copy)]
enum Slot {
    Node(usize),
    Entry(usize, TileRef),
}

#[derive(Debug, Clone, Copy)]
struct Item {
    dist: f64,
    slot: Slot,
}

impl Item {
    /// Ascending key: distance, then nodes before entries (a node at the same
    /// bound may still hold an entry with a smaller tile id), then tile id.
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then_with(|| match (self.slot, other.slot) {
            (Slot::Node(a), Slot::Node(b)) => a.cmp(&b),
            (Slot::Node(_), Slot::Entry(..)) => Ordering::Less,
            (Slot::Entry(..), Slot::Node(_)) => Ordering::Greater,
            (Slot::Entry(a, ta), Slot::Entry(b, tb)) => ta.cmp(&tb).then(a.cmp(&b)),
        })
    }
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    // Reversed so the max-heap pops the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Best-first incremental nearest-neighbour traversal for one query point.
///
/// Entries come out in non-decreasing distance, equal distances ordered by
/// tile id, each exactly once.
#[derive(Debug)]
pub struct NnCursor<'a> {
    index: &'a SpatialIndex,
    q: Vec<f64>,
    heap: BinaryHeap<Item>,
    pops: usize,
    distance_evals: usize,
}

impl<'a> NnCursor<'a> {
    pub fn new(index: &'a SpatialIndex, q: &[f64]) -> Result<Self> {
        if q.len() != index.dim() {
            return Err(Error::DimensionMismatch {
                expected: index.dim(),
                found: q.len(),
            });
        }
        let root = index.root();
        let dist = index.node(root).mbr().mindist_unchecked(q, index.metric());
        Ok(Self {
            index,
            q: q.to_vec(),
            heap: BinaryHeap::from([Item {
                dist,
                slot: Slot::Node(root),
            }]),
            pops: 0,
            distance_evals: 1,
        })
    }

    /// Heap pops so far, nodes and entries alike.
    pub fn pops(&self) -> usize {
        self.pops
    }

    /// Point and box distance computations so far.
    pub fn distance_evals(&self) -> usize {
        self.distance_evals
    }

    pub fn is_exhausted(&self) -> bool {
        self.heap.is_empty()
    }
}

impl<'a> Iterator for NnCursor<'a> {
    type Item = (&'a LeafEntry, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let index = self.index;
        let metric = index.metric();
        while let Some(item) = self.heap.pop() {
            self.pops += 1;
            match item.slot {
                Slot::Entry(i, _) => return Some((index.entry(i), item.dist)),
                Slot::Node(n) => {
                    let node = index.node(n);
                    self.distance_evals += node.children().len();
                    match node.kind() {
                        NodeKind::Leaf(children) => {
                            for &i in children {
                                let e = index.entry(i);
                                self.heap.push(Item {
                                    dist: metric.distance(&self.q, e.features.as_slice()),
                                    slot: Slot::Entry(i, e.tile),
                                });
                            }
                        }
                        NodeKind::Internal(children) => {
                            for &c in children {
                                self.heap.push(Item {
                                    dist: index.node(c).mbr().mindist_unchecked(&self.q, metric),
                                    slot: Slot::Node(c),
                                });
                            }
                        }
                    }
                }
            }
        }
        None
    }
}
