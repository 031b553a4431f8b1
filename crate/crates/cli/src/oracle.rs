//! Self-checks of the region solvers: DP soundness against exhaustive
//! search, how often capturable optima are reached, the Steiner-tree
//! reduction, and the 3x4 worked example.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subregion::mwcs::{
    dp_corner_run, dp_max_region, exact_mwcs, is_dp_capturable, rectilinear_steiner_length, trst_to_mwcs, Corner,
    TrstInstance, DEFAULT_CELL_CAP,
};
use subregion::{Cell, ScoreMatrix};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    /// Matrix shapes, cycled through; each at most 16 cells.
    pub sizes: Vec<(usize, usize)>,
    pub trials: usize,
    pub seed: u64,
    /// Seeded 2-3 terminal instances on a 3x3 grid.
    pub trst_instances: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            sizes: vec![(2, 2), (2, 3), (3, 2), (3, 3), (3, 4), (4, 3), (4, 4)],
            trials: 1000,
            seed: 0,
            trst_instances: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleReport {
    pub matrices: usize,
    /// Matrices where the DP beat the exhaustive optimum.
    pub soundness_violations: Vec<String>,
    pub dp_attained: usize,
    pub capturable_optima: usize,
    pub capturable_attained: usize,
    pub trst_instances: usize,
    pub trst_violations: Vec<String>,
    pub worked_exact: f64,
    pub worked_exact_cells: Vec<Cell>,
    pub worked_bottom_left: f64,
    pub worked_bottom_left_cells: Vec<Cell>,
    pub worked_four_corner: f64,
}

/// The 3x4 worked example; row 0 is the bottom row.
pub fn worked_example() -> ScoreMatrix {
    ScoreMatrix::from_rows(&[
        [-1.0, -1.0, 10.0, -1.0],
        [-1.0, 10.0, 1.0, 35.0],
        [-1.0, -1.0, 40.0, -90.0],
    ])
    .expect("constant matrix")
}

pub const WORKED_EXACT: f64 = 96.0;
pub const WORKED_EXACT_CELLS: [Cell; 5] = [(0, 2), (1, 1), (1, 2), (1, 3), (2, 2)];
pub const WORKED_BOTTOM_LEFT: f64 = 61.0;
pub const WORKED_BOTTOM_LEFT_CELLS: [Cell; 4] = [(0, 2), (1, 1), (1, 2), (2, 2)];

impl OracleReport {
    pub fn worked_example_ok(&self) -> bool {
        self.worked_exact == WORKED_EXACT
            && self.worked_exact_cells == WORKED_EXACT_CELLS
            && self.worked_bottom_left == WORKED_BOTTOM_LEFT
            && self.worked_bottom_left_cells == WORKED_BOTTOM_LEFT_CELLS
    }

    pub fn passed(&self) -> bool {
        self.soundness_violations.is_empty() && self.trst_violations.is_empty() && self.worked_example_ok()
    }

    pub fn render(&self) -> String {
        let rate = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
        let mut s = format!(
            "soundness: {} matrices, {} violations\n\
             dp attained exact optimum: {}/{} ({:.3})\n\
             capturable optima attained: {}/{} ({:.3})\n\
             steiner reduction: {} instances, {} violations\n\
             worked example: exact {} {:?}, bottom-left run {} {:?}, four-corner {} ({})\n",
            self.matrices,
            self.soundness_violations.len(),
            self.dp_attained,
            self.matrices,
            rate(self.dp_attained, self.matrices),
            self.capturable_attained,
            self.capturable_optima,
            rate(self.capturable_attained, self.capturable_optima),
            self.trst_instances,
            self.trst_violations.len(),
            self.worked_exact,
            self.worked_exact_cells,
            self.worked_bottom_left,
            self.worked_bottom_left_cells,
            self.worked_four_corner,
            if self.worked_example_ok() { "ok" } else { "MISMATCH" },
        );
        for v in self.soundness_violations.iter().chain(&self.trst_violations) {
            s.push_str(&format!("violation: {v}\n"));
        }
        s
    }
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i32, hi: i32) -> ScoreMatrix {
    let scores = (0..rows * cols).map(|_| rng.gen_range(lo..=hi) as f64).collect();
    ScoreMatrix::new(rows, cols, scores).expect("non-empty shape")
}

/// Seeded Steiner instance with 2 or 3 distinct terminals on a 3x3 grid.
pub fn random_trst(rng: &mut ChaCha8Rng) -> TrstInstance {
    let n = rng.gen_range(2..=3);
    let mut terminals = Vec::with_capacity(n);
    while terminals.len() < n {
        let p = (rng.gen_range(0..3), rng.gen_range(0..3));
        if !terminals.contains(&p) {
            terminals.push(p);
        }
    }
    TrstInstance {
        grid: 3,
        terminals,
        weight: 100.0,
        length: 8,
    }
}

pub fn run_oracle(opts: &OracleOptions) -> CliResult<OracleReport> {
    if opts.sizes.is_empty() {
        return Err(CliError::Usage("at least one matrix size is required".into()));
    }
    if let Some(&(r, c)) = opts.sizes.iter().find(|&&(r, c)| r == 0 || c == 0 || r * c > DEFAULT_CELL_CAP) {
        return Err(CliError::Usage(format!(
            "size {r}x{c} must have between 1 and {DEFAULT_CELL_CAP} cells"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = OracleReport::default();
    for t in 0..opts.trials {
        let (rows, cols) = opts.sizes[t % opts.sizes.len()];
        let m = random_int_matrix(&mut rng, rows, cols, -10, 10);
        let dp = dp_max_region(&m);
        let exact = exact_mwcs(&m, DEFAULT_CELL_CAP)?;
        report.matrices += 1;
        if dp.score > exact.score {
            report
                .soundness_violations
                .push(format!("dp {} > exact {} on {:?}", dp.score, exact.score, m.scores()));
        }
        if dp.score == exact.score {
            report.dp_attained += 1;
        }
        if is_dp_capturable(exact.cells())? {
            report.capturable_optima += 1;
            if dp.score == exact.score {
                report.capturable_attained += 1;
            }
        }
    }

    for _ in 0..opts.trst_instances {
        let inst = random_trst(&mut rng);
        let m = trst_to_mwcs(&inst)?;
        let best = exact_mwcs(&m, m.len())?.score;
        let l = rectilinear_steiner_length(inst.grid, &inst.terminals)?;
        report.trst_instances += 1;
        if best != inst.target_weight(l) {
            report.trst_violations.push(format!(
                "terminals {:?}: mwcs {best}, expected {}",
                inst.terminals,
                inst.target_weight(l)
            ));
        }
    }

    let m = worked_example();
    let exact = exact_mwcs(&m, DEFAULT_CELL_CAP)?;
    let bl = dp_corner_run(&m, Corner::BottomLeft);
    report.worked_exact = exact.score;
    report.worked_exact_cells = exact.cells().to_vec();
    report.worked_bottom_left = bl.score;
    report.worked_bottom_left_cells = bl.cells().to_vec();
    report.worked_four_corner = dp_max_region(&m).score;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let r = run_oracle(&OracleOptions {
            trials: 200,
            trst_instances: 10,
            ..OracleOptions::default()
        })
        .unwrap();
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.worked_four_corner, 95.0);
        assert!(r.capturable_attained <= r.capturable_optima);
    }

    #[test]
    fn oversized_matrices_are_rejected() {
        let opts = OracleOptions {
            sizes: vec![(5, 4)],
            ..OracleOptions::default()
        };
        assert_eq!(run_oracle(&opts).unwrap_err().exit_code(), 1);
    }
}
