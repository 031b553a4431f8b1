use std::cmp::Ordering;

use super::catalog::Catalog;
use super::cursor::NnCursor;
use super::mbr::Mbr;
use crate::error::{invalid, Error, Result};
use crate::model::{FeatureVector, Metric, TileRef};

/// Default fanout of leaf and internal nodes.
pub const DEFAULT_CAPACITY: usize = 64;

/// One indexed tile: its (reduced) feature vector and grid position.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafEntry {
    pub features: FeatureVector,
    pub tile: TileRef,
}

/// Children of a node, as indices into the entry or node arena.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Leaf(Vec<usize>),
    Internal(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    mbr: Mbr,
    kind: NodeKind,
}

impl Node {
    pub fn new(mbr: Mbr, kind: NodeKind) -> Self {
        Self { mbr, kind }
    }

    pub fn mbr(&self) -> &Mbr {
        &self.mbr
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf(_))
    }

    /// Entry indices for a leaf, node indices otherwise.
    pub fn children(&self) -> &[usize] {
        match &self.kind {
            NodeKind::Leaf(c) | NodeKind::Internal(c) => c,
        }
    }
}

/// Immutable in-memory R-tree with arena-allocated nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialIndex {
    dim: usize,
    metric: Metric,
    capacity: usize,
    entries: Vec<LeafEntry>,
    nodes: Vec<Node>,
    root: usize,
}

impl SpatialIndex {
    /// Indexes every tile of every catalog image.
    pub fn from_catalog(catalog: &Catalog, capacity: usize, metric: Metric) -> Result<Self> {
        let entries = catalog
            .images()
            .iter()
            .flat_map(|img| {
                img.tile_refs().map(move |t| LeafEntry {
                    features: img.tile(t.row, t.col).clone(),
                    tile: t,
                })
            })
            .collect();
        str_bulk_load(entries, capacity, metric)
    }

    /// Reassembles a persisted index and checks its structure.
    pub fn from_parts(
        dim: usize,
        metric: Metric,
        capacity: usize,
        entries: Vec<LeafEntry>,
        nodes: Vec<Node>,
        root: usize,
    ) -> Result<Self> {
        let index = Self {
            dim,
            metric,
            capacity,
            entries,
            nodes,
            root,
        };
        index.check_invariants()?;
        Ok(index)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LeafEntry] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &LeafEntry {
        &self.entries[i]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Number of levels; a lone leaf root has depth 1.
    pub fn depth(&self) -> usize {
        let mut depth = 1;
        let mut n = self.root;
        while let NodeKind::Internal(children) = &self.nodes[n].kind {
            n = children[0];
            depth += 1;
        }
        depth
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Incremental nearest-neighbour cursor around `q`.
    pub fn cursor(&self, q: &[f64]) -> Result<NnCursor<'_>> {
        NnCursor::new(self, q)
    }

    /// Full structural check: every node and entry reachable exactly once,
    /// fanout within capacity, and every box containing its subtree.
    pub fn check_invariants(&self) -> Result<()> {
        let broken = |msg: String| Err(Error::Integrity(msg));
        if self.capacity < 2 {
            return broken(format!("capacity {} is below 2", self.capacity));
        }
        if self.entries.is_empty() || self.root >= self.nodes.len() {
            return broken("index has no entries or no root".into());
        }
        if let Some(e) = self.entries.iter().find(|e| e.features.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: e.features.dim(),
            });
        }
        let mut node_seen = vec![false; self.nodes.len()];
        let mut entry_seen = vec![false; self.entries.len()];
        let mut stack = vec![self.root];
        node_seen[self.root] = true;
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node.mbr.dim() != self.dim {
                return broken(format!("node {n} has a {}-d box", node.mbr.dim()));
            }
            let children = node.children();
            if children.is_empty() || children.len() > self.capacity {
                return broken(format!("node {n} has fanout {}", children.len()));
            }
            for &c in children {
                match node.kind {
                    NodeKind::Leaf(_) => {
                        if c >= self.entries.len() || entry_seen[c] {
                            return broken(format!("entry {c} is missing or shared"));
                        }
                        entry_seen[c] = true;
                        if !node.mbr.contains_point(self.entries[c].features.as_slice()) {
                            return broken(format!("entry {c} escapes the box of node {n}"));
                        }
                    }
                    NodeKind::Internal(_) => {
                        if c >= self.nodes.len() || node_seen[c] {
                            return broken(format!("node {c} is missing or shared"));
                        }
                        node_seen[c] = true;
                        if !node.mbr.contains(&self.nodes[c].mbr) {
                            return broken(format!("node {c} escapes the box of node {n}"));
                        }
                        stack.push(c);
                    }
                }
            }
        }
        if !node_seen.iter().all(|&s| s) || !entry_seen.iter().all(|&s| s) {
            return broken("unreachable nodes or entries".into());
        }
        Ok(())
    }
}

/// Sort-Tile-Recursive packing. Entries are sliced dimension by dimension,
/// in decreasing order of variance, into runs of `capacity`; upper levels
/// pack the box centres of the level below the same way.
///
/// Leaves are full except the last, so there are `ceil(N / capacity)`.
pub fn str_bulk_load(entries: Vec<LeafEntry>, capacity: usize, metric: Metric) -> Result<SpatialIndex> {
    if capacity < 2 {
        return invalid(format!("capacity must be at least 2, got {capacity}"));
    }
    if entries.is_empty() {
        return invalid("cannot index an empty set of entries");
    }
    let dim = entries[0].features.dim();
    if let Some(e) = entries.iter().find(|e| e.features.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: e.features.dim(),
        });
    }

    let coord = |i: usize, d: usize| entries[i].features.as_slice()[d];
    let order = variance_order(entries.len(), dim, &coord);
    let mut items: Vec<usize> = (0..entries.len()).collect();
    let mut groups = Vec::new();
    pack(
        &mut items,
        &order,
        capacity,
        &coord,
        &|a, b| entries[a].tile.cmp(&entries[b].tile).then(a.cmp(&b)),
        &mut groups,
    );

    // Store entries leaf by leaf.
    let mut slots: Vec<Option<LeafEntry>> = entries.into_iter().map(Some).collect();
    let mut packed = Vec::with_capacity(slots.len());
    let mut nodes = Vec::new();
    for group in &groups {
        let start = packed.len();
        for &i in group {
            packed.push(slots[i].take().expect("each entry packed once"));
        }
        let mut mbr = Mbr::point(packed[start].features.as_slice());
        for e in &packed[start + 1..] {
            mbr.expand_point(e.features.as_slice());
        }
        nodes.push(Node::new(mbr, NodeKind::Leaf((start..packed.len()).collect())));
    }

    let mut level: Vec<usize> = (0..nodes.len()).collect();
    while level.len() > 1 {
        let centre = |i: usize, d: usize| nodes[level[i]].mbr.centre(d);
        let order = variance_order(level.len(), dim, &centre);
        let mut items: Vec<usize> = (0..level.len()).collect();
        let mut groups = Vec::new();
        pack(&mut items, &order, capacity, &centre, &|a, b| a.cmp(&b), &mut groups);
        let mut next = Vec::with_capacity(groups.len());
        for group in groups {
            let children: Vec<usize> = group.iter().map(|&i| level[i]).collect();
            let mut mbr = nodes[children[0]].mbr.clone();
            for &c in &children[1..] {
                mbr.expand(&nodes[c].mbr);
            }
            next.push(nodes.len());
            nodes.push(Node::new(mbr, NodeKind::Internal(children)));
        }
        level = next;
    }

    Ok(SpatialIndex {
        dim,
        metric,
        capacity,
        entries: packed,
        root: level[0],
        nodes,
    })
}

/// Dimensions by decreasing variance, ties by dimension index.
fn variance_order(n: usize, dim: usize, coord: &dyn Fn(usize, usize) -> f64) -> Vec<usize> {
    let variance: Vec<f64> = (0..dim)
        .map(|d| {
            let mean = (0..n).map(|i| coord(i, d)).sum::<f64>() / n as f64;
            (0..n).map(|i| (coord(i, d) - mean).powi(2)).sum::<f64>() / n as f64
        })
        .collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| variance[b].total_cmp(&variance[a]).then(a.cmp(&b)));
    order
}

fn pack(
    items: &mut [usize],
    order: &[usize],
    capacity: usize,
    coord: &dyn Fn(usize, usize) -> f64,
    tie: &dyn Fn(usize, usize) -> Ordering,
    out: &mut Vec<Vec<usize>>,
) {
    if items.len() <= capacity {
        out.push(items.to_vec());
        return;
    }
    let d = order.first().copied().unwrap_or(0);
    items.sort_by(|&a, &b| coord(a, d).total_cmp(&coord(b, d)).then_with(|| tie(a, b)));
    if order.len() <= 1 {
        out.extend(items.chunks(capacity).map(<[usize]>::to_vec));
        return;
    }
    let pages = items.len().div_ceil(capacity);
    let slices = smallest_root(pages, order.len());
    // A multiple of `capacity`, so only the final leaf can be short.
    let slab = capacity * pages.div_ceil(slices);
    for chunk in items.chunks_mut(slab) {
        pack(chunk, &order[1..], capacity, coord, tie, out);
    }
}

/// Smallest `s` with `s^k >= n`.
fn smallest_root(n: usize, k: usize) -> usize {
    let mut s = 1usize;
    while (0..k).try_fold(1usize, |acc, _| acc.checked_mul(s)).is_some_and(|p| p < n) {
        s += 1;
    }
    s
}
