use std::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::model::{Cell, Region, ScoreMatrix};

/// Default size limit for exhaustive search.
pub const DEFAULT_CELL_CAP: usize = 16;

struct Search<'a> {
    scores: &'a [f64],
    neighbours: Vec<u64>,
    all: u64,
    best: Option<(u64, f64)>,
}

impl Search<'_> {
    fn positive_sum(&self, mut mask: u64) -> f64 {
        let mut sum = 0.0;
        while mask != 0 {
            let s = self.scores[mask.trailing_zeros() as usize];
            if s > 0.0 {
                sum += s;
            }
            mask &= mask - 1;
        }
        sum
    }

    fn offer(&mut self, set: u64, sum: f64) {
        let better = match self.best {
            None => true,
            Some((cur, cur_sum)) => sum
                .total_cmp(&cur_sum)
                .then(cur.count_ones().cmp(&set.count_ones()))
                // Lower bit = smaller cell; the set owning the lowest differing
                // bit is lexicographically first.
                .then_with(|| {
                    let diff = cur ^ set;
                    if diff == 0 {
                        Ordering::Equal
                    } else if set & diff & diff.wrapping_neg() != 0 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    }
                })
                == Ordering::Greater,
        };
        if better {
            self.best = Some((set, sum));
        }
    }

    fn pruned(&self, set: u64, sum: f64, forbidden: u64) -> bool {
        match self.best {
            None => false,
            Some((_, best)) => sum + self.positive_sum(self.all & !set & !forbidden) < best,
        }
    }

    /// Enumerates every connected superset of `set` that avoids `forbidden`
    /// and grows through `ext`, each exactly once.
    fn grow(&mut self, set: u64, sum: f64, mut ext: u64, mut forbidden: u64) {
        self.offer(set, sum);
        while ext != 0 {
            if self.pruned(set, sum, forbidden) {
                return;
            }
            let w = ext.trailing_zeros() as usize;
            let bit = 1u64 << w;
            ext &= !bit;
            let fresh = self.neighbours[w] & !set & !forbidden & !ext & !bit;
            self.grow(set | bit, sum + self.scores[w], ext | fresh, forbidden);
            forbidden |= bit;
        }
    }
}

/// Exact maximum-score connected region by exhaustive enumeration of the
/// connected cell sets, with a positive-sum bound to skip hopeless branches.
///
/// Ties prefer fewer cells, then the lexicographically smaller cell list.
pub fn exact_mwcs(m: &ScoreMatrix, cell_cap: usize) -> Result<Region> {
    let n = m.len();
    if n > cell_cap {
        return Err(Error::TooLarge { cells: n, cap: cell_cap });
    }
    if n > 64 {
        return invalid("exhaustive search supports at most 64 cells");
    }
    let (rows, cols) = (m.rows(), m.cols());
    let neighbours = (0..n)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            let mut mask = 0u64;
            if r > 0 {
                mask |= 1 << (k - cols);
            }
            if r + 1 < rows {
                mask |= 1 << (k + cols);
            }
            if c > 0 {
                mask |= 1 << (k - 1);
            }
            if c + 1 < cols {
                mask |= 1 << (k + 1);
            }
            mask
        })
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = Search {
        scores: m.scores(),
        neighbours,
        all,
        best: None,
    };
    for v in 0..n {
        let bit = 1u64 << v;
        let below = bit - 1;
        if search.pruned(bit, m.scores()[v], below) {
            continue;
        }
        let ext = search.neighbours[v] & !below;
        search.grow(bit, m.scores()[v], ext, below);
    }
    let (set, _) = search.best.expect("non-empty matrix");
    let cells: Vec<Cell> = (0..n)
        .filter(|k| set & (1 << k) != 0)
        .map(|k| (k / cols, k % cols))
        .collect();
    let score = cells.iter().map(|&(r, c)| m.get(r, c)).sum();
    Ok(Region::from_sorted_unchecked(cells, score))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let m = ScoreMatrix::from_rows(&[[5.0, -1.0], [-2.0, 3.0]]).unwrap();
        let r = exact_mwcs(&m, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(r.score, 7.0);
        assert_eq!(r.cells(), &[(0, 0), (0, 1), (1, 1)]);

        let neg = ScoreMatrix::from_rows(&[[-4.0, -2.0], [-7.0, -1.0]]).unwrap();
        let r = exact_mwcs(&neg, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(r.cells(), &[(1, 1)]);
        assert_eq!(r.score, -1.0);
    }

    #[test]
    fn tie_prefers_fewer_cells_then_lexicographic() {
        // {(0,0)} and {(0,2)} both score 4; {(0,0),(0,1),(0,2)} also scores 4.
        let m = ScoreMatrix::from_rows(&[[4.0, -4.0, 4.0]]).unwrap();
        let r = exact_mwcs(&m, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(r.cells(), &[(0, 0)]);
    }

    #[test]
    fn cap_is_enforced() {
        let m = ScoreMatrix::new(5, 4, vec![1.0; 20]).unwrap();
        assert!(matches!(
            exact_mwcs(&m, DEFAULT_CELL_CAP),
            Err(Error::TooLarge { cells: 20, cap: 16 })
        ));
        assert_eq!(exact_mwcs(&m, 20).unwrap().score, 20.0);
    }

    #[test]
    fn disconnected_positives_need_a_bridge() {
        // Bridging 9 and 9 through -1 beats either alone.
        let m = ScoreMatrix::from_rows(&[[9.0, -1.0, 9.0], [-5.0, -5.0, -5.0]]).unwrap();
        let r = exact_mwcs(&m, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(r.score, 17.0);
        assert_eq!(r.cells(), &[(0, 0), (0, 1), (0, 2)]);
    }
}
