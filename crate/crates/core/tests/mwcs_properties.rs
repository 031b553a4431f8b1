mod common;

use proptest::prelude::*;
use subregion::mwcs::{
    dp_corner_run, dp_max_region, exact_mwcs, is_dp_capturable, rectilinear_steiner_length, trst_to_mwcs, Corner,
    TrstInstance,
};
use subregion::scoring::{upper_bound, BoundMode};
use subregion::{is_connected, region_sum, ScoreMatrix};

fn matrix(max_rows: usize, max_cols: usize, lo: i32, hi: i32) -> impl Strategy<Value = ScoreMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(lo..=hi, r * c)
            .prop_map(move |v| ScoreMatrix::new(r, c, v.into_iter().map(f64::from).collect()).unwrap())
    })
}

fn flip_rows(m: &ScoreMatrix) -> ScoreMatrix {
    let rows: Vec<Vec<f64>> = (0..m.rows())
        .rev()
        .map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect())
        .collect();
    ScoreMatrix::from_rows(&rows).unwrap()
}

fn flip_cols(m: &ScoreMatrix) -> ScoreMatrix {
    let rows: Vec<Vec<f64>> = (0..m.rows())
        .map(|r| (0..m.cols()).rev().map(|c| m.get(r, c)).collect())
        .collect();
    ScoreMatrix::from_rows(&rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn dp_never_beats_exact(m in matrix(4, 4, -10, 10)) {
        let dp = dp_max_region(&m);
        let exact = exact_mwcs(&m, 16).unwrap();
        prop_assert!(dp.score <= exact.score);
        prop_assert!(dp.score >= m.max_entry());
    }

    #[test]
    fn regions_are_valid(m in matrix(5, 5, -20, 20)) {
        for corner in Corner::ALL {
            let r = dp_corner_run(&m, corner);
            prop_assert!(is_connected(r.cells()).unwrap());
            prop_assert_eq!(region_sum(&m, r.cells()).unwrap(), r.score);
        }
        let e = exact_mwcs(&m, 25).unwrap();
        prop_assert!(is_connected(e.cells()).unwrap());
        prop_assert_eq!(region_sum(&m, e.cells()).unwrap(), e.score);
    }

    #[test]
    fn corner_runs_match_set_oracle(m in matrix(5, 5, -10, 10)) {
        for corner in Corner::ALL {
            let r = dp_corner_run(&m, corner);
            let (score, cells) = common::oracle_corner(&m, corner);
            prop_assert_eq!(r.score, score);
            prop_assert_eq!(r.cells(), cells.as_slice());
        }
    }

    #[test]
    fn flips_preserve_the_four_corner_score(m in matrix(5, 5, -10, 10)) {
        let s = dp_max_region(&m).score;
        prop_assert_eq!(dp_max_region(&flip_rows(&m)).score, s);
        prop_assert_eq!(dp_max_region(&flip_cols(&m)).score, s);
    }

    #[test]
    fn positive_sum_dominates_exact(m in matrix(4, 4, -10, 10)) {
        let exact = exact_mwcs(&m, 16).unwrap();
        prop_assert!(upper_bound(&m, BoundMode::SafePositiveSum) >= exact.score);
    }

    #[test]
    fn all_positive_matrices_are_solved(m in matrix(4, 4, -5, 5)) {
        let pos = ScoreMatrix::new(m.rows(), m.cols(), m.scores().iter().map(|s| s.abs() + 1.0).collect()).unwrap();
        let total: f64 = pos.scores().iter().sum();
        prop_assert_eq!(dp_max_region(&pos).score, total);
        let cells: Vec<_> = (0..m.rows()).flat_map(|r| (0..m.cols()).map(move |c| (r, c))).collect();
        prop_assert!(is_dp_capturable(&cells).unwrap());
    }

    #[test]
    fn steiner_reduction_weight(
        terms in prop::sample::subsequence((0..9).collect::<Vec<usize>>(), 1..=3)
    ) {
        let terminals: Vec<(usize, usize)> = terms.iter().map(|&k| (k / 3, k % 3)).collect();
        let l = rectilinear_steiner_length(3, &terminals).unwrap();
        let inst = TrstInstance { grid: 3, terminals: terminals.clone(), weight: 100.0, length: l };
        let m = trst_to_mwcs(&inst).unwrap();
        let best = exact_mwcs(&m, 25).unwrap();
        prop_assert_eq!(best.score, inst.target_weight(l));
    }
}
