use std::cmp::Ordering;

use super::bits::{lex_cmp, CellSets};
use crate::model::{Cell, Region, ScoreMatrix};

/// Starting corner of a DP run together with its pair of moves.
///
/// Row 0 is the bottom row, so "up" increases the row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    /// Moves right and up.
    BottomLeft,
    /// Moves left and up.
    BottomRight,
    /// Moves right and down.
    TopLeft,
    /// Moves left and down.
    TopRight,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::BottomLeft,
        Corner::BottomRight,
        Corner::TopLeft,
        Corner::TopRight,
    ];

    /// Row step of the vertical move.
    pub fn row_step(self) -> isize {
        match self {
            Corner::BottomLeft | Corner::BottomRight => 1,
            Corner::TopLeft | Corner::TopRight => -1,
        }
    }

    /// Column step of the horizontal move.
    pub fn col_step(self) -> isize {
        match self {
            Corner::BottomLeft | Corner::TopLeft => 1,
            Corner::BottomRight | Corner::TopRight => -1,
        }
    }
}

struct Candidate {
    score: f64,
    count: usize,
}

/// One DP pass from `corner`, scanning rows away from the corner.
///
/// For every cell the best region ending there is the best of: the cell
/// alone, the cell plus the region of its horizontal predecessor, the cell
/// plus the region of its vertical predecessor, or the cell plus the union of
/// both (the shared cells counted once). The returned region is the best one
/// over all cells of the run, not only the final cell.
pub fn dp_corner_run(m: &ScoreMatrix, corner: Corner) -> Region {
    let (rows, cols) = (m.rows(), m.cols());
    let n = rows * cols;
    let scores = m.scores();
    let mut sets = CellSets::new(n, n);
    let mut best_score = vec![0.0f64; n];
    let mut count = vec![0usize; n];

    let actual_row = |a: usize| if corner.row_step() > 0 { a } else { rows - 1 - a };
    let actual_col = |b: usize| if corner.col_step() > 0 { b } else { cols - 1 - b };

    let mut answer: Option<usize> = None;

    for a in 0..rows {
        let i = actual_row(a);
        for b in 0..cols {
            let j = actual_col(b);
            let idx = i * cols + j;
            let s = scores[idx];
            let horizontal = (b > 0).then(|| i * cols + actual_col(b - 1));
            let vertical = (a > 0).then(|| actual_row(a - 1) * cols + j);

            // Case 1: the cell alone.
            let mut pick = 1u8;
            let mut chosen = Candidate { score: s, count: 1 };
            let mut consider = |case: u8, cand: Candidate, chosen: &mut Candidate| {
                let better = cand.score > chosen.score
                    || (cand.score == chosen.score && cand.count < chosen.count);
                if better {
                    *chosen = cand;
                    pick = case;
                }
            };
            if let Some(h) = horizontal {
                consider(
                    2,
                    Candidate {
                        score: s + best_score[h],
                        count: count[h] + 1,
                    },
                    &mut chosen,
                );
            }
            if let Some(v) = vertical {
                consider(
                    3,
                    Candidate {
                        score: s + best_score[v],
                        count: count[v] + 1,
                    },
                    &mut chosen,
                );
            }
            if let (Some(h), Some(v)) = (horizontal, vertical) {
                let (shared, shared_count) = sets.intersection_sum(h, v, scores);
                consider(
                    4,
                    Candidate {
                        score: s + best_score[h] + best_score[v] - shared,
                        count: count[h] + count[v] - shared_count + 1,
                    },
                    &mut chosen,
                );
            }

            match pick {
                2 => sets.copy(horizontal.unwrap(), idx),
                3 => sets.copy(vertical.unwrap(), idx),
                4 => sets.union_into(horizontal.unwrap(), vertical.unwrap(), idx),
                _ => {}
            }
            sets.insert(idx, idx);
            best_score[idx] = chosen.score;
            count[idx] = chosen.count;

            answer = Some(match answer {
                None => idx,
                Some(cur) => {
                    let order = chosen
                        .score
                        .total_cmp(&best_score[cur])
                        .then(count[cur].cmp(&chosen.count))
                        .then_with(|| lex_cmp(sets.set(cur), sets.set(idx)));
                    if order == Ordering::Greater {
                        idx
                    } else {
                        cur
                    }
                }
            });
        }
    }

    let end = answer.expect("score matrices are non-empty");
    let cells: Vec<Cell> = sets
        .members(end)
        .into_iter()
        .map(|k| (k / cols, k % cols))
        .collect();
    let score = cells.iter().map(|&(r, c)| m.get(r, c)).sum();
    Region::from_sorted_unchecked(cells, score)
}

/// Best region over the four corner runs.
///
/// Ties prefer fewer cells, then the lexicographically smaller cell list,
/// then the earlier corner in [`Corner::ALL`].
pub fn dp_max_region(m: &ScoreMatrix) -> Region {
    let mut best: Option<Region> = None;
    for corner in Corner::ALL {
        let r = dp_corner_run(m, corner);
        best = Some(match best {
            None => r,
            Some(cur) => {
                let order = r
                    .score
                    .total_cmp(&cur.score)
                    .then(cur.len().cmp(&r.len()))
                    .then_with(|| cur.cells().cmp(r.cells()));
                if order == Ordering::Greater {
                    r
                } else {
                    cur
                }
            }
        });
    }
    best.expect("four corner runs")
}
