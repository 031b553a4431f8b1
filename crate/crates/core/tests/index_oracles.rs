mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::Rng;
use subregion::index::{mindist, str_bulk_load, LeafEntry, Mbr, NodeKind, SpatialIndex};
use subregion::{FeatureVector, Metric, TileRef};

fn entries(points: &[Vec<f64>]) -> Vec<LeafEntry> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| LeafEntry {
            features: FeatureVector::new(p.clone()).unwrap(),
            tile: TileRef {
                image_id: i / 16,
                row: (i % 16) / 4,
                col: i % 4,
            },
        })
        .collect()
}

fn sorted_oracle(index: &SpatialIndex, q: &[f64]) -> Vec<(f64, TileRef)> {
    let mut all: Vec<(f64, TileRef)> = index
        .entries()
        .iter()
        .map(|e| (index.metric().distance(q, e.features.as_slice()), e.tile))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all
}

#[test]
fn cursor_matches_sort_oracle() {
    let mut rng = common::rng(7);
    for metric in [Metric::L2, Metric::L1] {
        let points: Vec<Vec<f64>> = (0..500)
            .map(|_| (0..3).map(|_| rng.gen_range(-50.0..50.0)).collect())
            .collect();
        let index = str_bulk_load(entries(&points), 8, metric).unwrap();
        for _ in 0..100 {
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-60.0..60.0)).collect();
            let got: Vec<(f64, TileRef)> = index.cursor(&q).unwrap().map(|(e, d)| (d, e.tile)).collect();
            assert_eq!(got, sorted_oracle(&index, &q));
        }
    }
}

#[test]
fn duplicate_points_drain_in_tile_order() {
    let mut rng = common::rng(8);
    // Few distinct points, many copies: distance ties everywhere.
    let protos: Vec<Vec<f64>> = (0..5).map(|_| vec![rng.gen_range(0.0..4.0_f64).round(), 1.0]).collect();
    let points: Vec<Vec<f64>> = (0..300).map(|_| protos[rng.gen_range(0..5)].clone()).collect();
    let index = str_bulk_load(entries(&points), 6, Metric::L2).unwrap();
    for q in [[0.0, 0.0], [2.0, 1.0], [5.0, -3.0]] {
        let got: Vec<(f64, TileRef)> = index.cursor(&q).unwrap().map(|(e, d)| (d, e.tile)).collect();
        assert_eq!(got, sorted_oracle(&index, &q));
    }
}

fn subtree_points<'a>(index: &'a SpatialIndex, node: usize, out: &mut Vec<&'a [f64]>) {
    match index.node(node).kind() {
        NodeKind::Leaf(es) => out.extend(es.iter().map(|&e| index.entry(e).features.as_slice())),
        NodeKind::Internal(cs) => cs.iter().for_each(|&c| subtree_points(index, c, out)),
    }
}

#[test]
fn mindist_lower_bounds_subtrees() {
    let mut rng = common::rng(11);
    let points: Vec<Vec<f64>> = (0..1000)
        .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0) * 1e3).collect())
        .collect();
    let index = str_bulk_load(entries(&points), 10, Metric::L2).unwrap();
    let mut checks = 0;
    let mut violations = 0;
    while checks < 10_000 {
        let node = rng.gen_range(0..index.nodes().len());
        let q: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.5..1.5) * 1e3).collect();
        let mut pts = Vec::new();
        subtree_points(&index, node, &mut pts);
        let lb = mindist(&q, index.node(node).mbr(), Metric::L2).unwrap();
        let best = pts.iter().map(|p| Metric::L2.distance(&q, p)).fold(f64::INFINITY, f64::min);
        violations += usize::from(lb > best);
        checks += 1;
    }
    assert_eq!(violations, 0);
}

#[test]
fn containment_over_random_builds() {
    let mut rng = common::rng(12);
    for (n, cap) in [(1000, 4), (1000, 64), (37, 2), (2, 2)] {
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        let index = str_bulk_load(entries(&points), cap, Metric::L2).unwrap();
        index.check_invariants().unwrap();
        let mut seen: HashMap<TileRef, usize> = HashMap::new();
        let mut pts = Vec::new();
        subtree_points(&index, index.root(), &mut pts);
        assert_eq!(pts.len(), n);
        for e in index.entries() {
            *seen.entry(e.tile).or_default() += 1;
        }
        assert!(seen.values().all(|&c| c == 1));
    }
}

proptest! {
    #[test]
    fn mindist_is_zero_inside_and_bounds_corners(
        lo in prop::collection::vec(-100.0..100.0f64, 3),
        ext in prop::collection::vec(0.0..50.0f64, 3),
        q in prop::collection::vec(-200.0..200.0f64, 3),
        t in prop::collection::vec(0.0..1.0f64, 3),
    ) {
        let hi: Vec<f64> = lo.iter().zip(&ext).map(|(a, e)| a + e).collect();
        let b = Mbr::new(lo.clone(), hi.clone()).unwrap();
        let inside: Vec<f64> = (0..3).map(|i| lo[i] + t[i] * (hi[i] - lo[i])).collect();
        prop_assert_eq!(mindist(&inside, &b, Metric::L2).unwrap(), 0.0);
        for metric in [Metric::L1, Metric::L2] {
            prop_assert!(mindist(&q, &b, metric).unwrap() <= metric.distance(&q, &inside));
        }
    }

    #[test]
    fn drain_is_complete(n in 1usize..200, cap in 2usize..12, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..2).map(|_| rng.gen_range(-10.0..10.0)).collect())
            .collect();
        let index = str_bulk_load(entries(&points), cap, Metric::L2).unwrap();
        let mut c = index.cursor(&[0.0, 0.0]).unwrap();
        let mut last = 0.0;
        let mut count = 0;
        for (_, d) in c.by_ref() {
            prop_assert!(d >= last);
            last = d;
            count += 1;
        }
        prop_assert_eq!(count, n);
        prop_assert!(c.next().is_none());
    }
}
