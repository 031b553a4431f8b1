use crate::error::{invalid, Result};
use crate::model::ScoreMatrix;

/// A rectilinear Steiner tree instance with terminals on an `m x m` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrstInstance {
    /// Grid side `m`.
    pub grid: usize,
    /// Terminal points as `(row, col)`, each in `0..grid`.
    pub terminals: Vec<(usize, usize)>,
    /// Terminal weight, much larger than any tree length.
    pub weight: f64,
    /// Tree length budget.
    pub length: usize,
}

impl TrstInstance {
    pub fn validate(&self) -> Result<()> {
        if self.grid == 0 || self.terminals.is_empty() {
            return invalid("instance needs a non-empty grid and at least one terminal");
        }
        for (k, &(r, c)) in self.terminals.iter().enumerate() {
            if r >= self.grid || c >= self.grid {
                return invalid(format!("terminal ({r}, {c}) is off the {0}x{0} grid", self.grid));
            }
            if self.terminals[..k].contains(&(r, c)) {
                return invalid(format!("terminal ({r}, {c}) is repeated"));
            }
        }
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return invalid("terminal weight must be positive");
        }
        Ok(())
    }

    /// Weight a connected subgraph reaches iff a tree of length `length` exists.
    pub fn target_weight(&self, length: usize) -> f64 {
        self.terminals.len() as f64 * self.weight - length as f64
    }
}

/// Builds the `(2m-1) x (2m-1)` weighted matrix graph of an instance.
///
/// Grid point `(i, j)` sits at cell `(2i, 2j)` with weight `w` for terminals
/// and 0 otherwise; cells between two consecutive grid points weigh -1. The
/// `(odd, odd)` cells have no counterpart in the graph and carry
/// `-(n*w + l + 1)`, which keeps them out of every optimal region.
pub fn trst_to_mwcs(inst: &TrstInstance) -> Result<ScoreMatrix> {
    inst.validate()?;
    let side = 2 * inst.grid - 1;
    let hole = -(inst.terminals.len() as f64 * inst.weight + inst.length as f64 + 1.0);
    let mut scores = vec![0.0; side * side];
    for r in 0..side {
        for c in 0..side {
            scores[r * side + c] = match (r % 2, c % 2) {
                (0, 0) => {
                    if inst.terminals.contains(&(r / 2, c / 2)) {
                        inst.weight
                    } else {
                        0.0
                    }
                }
                (1, 1) => hole,
                _ => -1.0,
            };
        }
    }
    ScoreMatrix::new(side, side, scores)
}

/// Minimum rectilinear Steiner tree length for terminals on an `m x m` grid,
/// by brute force over every set of grid points used as Steiner points and a
/// rectilinear minimum spanning tree over terminals plus those points.
///
/// Intended for tiny grids: the search is exponential in `m^2 - n`.
pub fn rectilinear_steiner_length(grid: usize, terminals: &[(usize, usize)]) -> Result<usize> {
    if terminals.is_empty() {
        return invalid("at least one terminal is required");
    }
    let free: Vec<(usize, usize)> = (0..grid)
        .flat_map(|r| (0..grid).map(move |c| (r, c)))
        .filter(|p| !terminals.contains(p))
        .collect();
    if free.len() > 20 {
        return invalid("grid too large for brute-force Steiner search");
    }
    let mut best = usize::MAX;
    let mut points = Vec::with_capacity(grid * grid);
    for mask in 0u32..(1u32 << free.len()) {
        points.clear();
        points.extend_from_slice(terminals);
        points.extend(
            free.iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &p)| p),
        );
        best = best.min(rectilinear_mst(&points));
    }
    Ok(best)
}

fn rectilinear_mst(points: &[(usize, usize)]) -> usize {
    let n = points.len();
    let dist = |a: (usize, usize), b: (usize, usize)| a.0.abs_diff(b.0) + a.1.abs_diff(b.1);
    let mut in_tree = vec![false; n];
    let mut link = vec![usize::MAX; n];
    link[0] = 0;
    let mut total = 0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by_key(|&v| link[v])
            .expect("unvisited vertex");
        in_tree[u] = true;
        total += link[u];
        for v in 0..n {
            if !in_tree[v] {
                link[v] = link[v].min(dist(points[u], points[v]));
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(terminals: &[(usize, usize)]) -> TrstInstance {
        TrstInstance {
            grid: 3,
            terminals: terminals.to_vec(),
            weight: 100.0,
            length: 8,
        }
    }

    #[test]
    fn construction_layout() {
        let m = trst_to_mwcs(&inst(&[(0, 0), (2, 1)])).unwrap();
        assert_eq!((m.rows(), m.cols()), (5, 5));
        assert_eq!(m.get(0, 0), 100.0);
        assert_eq!(m.get(4, 2), 100.0);
        assert_eq!(m.get(2, 2), 0.0);
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.get(1, 1), -(2.0 * 100.0 + 8.0 + 1.0));
    }

    #[test]
    fn off_grid_terminal_is_rejected() {
        assert!(trst_to_mwcs(&inst(&[(3, 0)])).is_err());
        assert!(trst_to_mwcs(&inst(&[(1, 1), (1, 1)])).is_err());
    }

    #[test]
    fn steiner_lengths() {
        assert_eq!(rectilinear_steiner_length(3, &[(1, 1)]).unwrap(), 0);
        assert_eq!(rectilinear_steiner_length(3, &[(0, 0), (0, 1)]).unwrap(), 1);
        assert_eq!(rectilinear_steiner_length(3, &[(0, 0), (2, 2)]).unwrap(), 4);
        // T shapes through a Steiner point.
        assert_eq!(rectilinear_steiner_length(3, &[(0, 1), (2, 1), (1, 0)]).unwrap(), 3);
        assert_eq!(rectilinear_steiner_length(3, &[(0, 0), (2, 0), (1, 2)]).unwrap(), 4);
    }
}
