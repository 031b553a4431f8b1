use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::index::{Catalog, LeafEntry};
use crate::model::{Alignment, Cell, QueryImage, RankedMatch, TileRef, TiledImage};
use crate::mwcs::dp_max_region;
use crate::scoring::score_matrix_actual;

use super::SearchConfig;

/// Every translation of `query` over `image` with at least one aligned
/// tile pair, row offset major.
pub fn enumerate_alignments(query: &QueryImage, image: &TiledImage) -> Vec<Alignment> {
    let (qr, qc) = (query.rows as i64, query.cols as i64);
    let (ir, ic) = (image.rows as i64, image.cols as i64);
    let mut out = Vec::with_capacity(((qr + ir - 1) * (qc + ic - 1)) as usize);
    for drow in -(qr - 1)..ir {
        for dcol in -(qc - 1)..ic {
            out.push(Alignment::new(image.id, drow, dcol));
        }
    }
    out
}

/// The alignment that puts query cell `q_pos` on tile `t`.
pub fn align_from_pair(q_pos: Cell, t: TileRef) -> Alignment {
    Alignment::new(
        t.image_id,
        t.row as i64 - q_pos.0 as i64,
        t.col as i64 - q_pos.1 as i64,
    )
}

/// Alignments already scored during one query execution.
#[derive(Debug, Clone, Default)]
pub struct ExploredSet(HashSet<Alignment>);

impl ExploredSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Marks `a` as explored; false if it already was.
    pub fn flag(&mut self, a: Alignment) -> bool {
        self.0.insert(a)
    }

    pub fn contains(&self, a: &Alignment) -> bool {
        self.0.contains(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Scores one alignment: the DP region of its actual score matrix.
pub fn evaluate_alignment(
    query: &QueryImage,
    image: &TiledImage,
    alignment: Alignment,
    config: &SearchConfig,
) -> Result<RankedMatch> {
    let m = score_matrix_actual(query, image, alignment, &config.params, config.metric)?;
    let overlap = m.origin().expect("actual matrices carry an origin").overlap;
    let region = dp_max_region(&m);
    Ok(RankedMatch {
        alignment,
        overlap,
        score: region.score,
        region,
    })
}

/// Scores the alignment pairing query cell `q_pos` with `leaf`, unless that
/// alignment was already explored.
pub fn get_max_sub_rg(
    leaf: &LeafEntry,
    q_pos: Cell,
    query: &QueryImage,
    catalog: &Catalog,
    config: &SearchConfig,
    explored: &mut ExploredSet,
) -> Result<Option<RankedMatch>> {
    let (image, _, _) = catalog.lookup(leaf.tile)?;
    if q_pos.0 >= query.rows || q_pos.1 >= query.cols {
        return Err(Error::OutOfBounds {
            row: q_pos.0,
            col: q_pos.1,
            rows: query.rows,
            cols: query.cols,
        });
    }
    let alignment = align_from_pair(q_pos, leaf.tile);
    if !explored.flag(alignment) {
        return Ok(None);
    }
    evaluate_alignment(query, image, alignment, config).map(Some)
}
