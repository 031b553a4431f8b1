//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subregion::index::Catalog;
use subregion::mwcs::Corner;
use subregion::{Cell, FeatureVector, QueryImage, QueryTile, ScoreMatrix, TiledImage};

/// Straight-line corner run: every cell keeps an explicit cell set.
pub fn oracle_corner(m: &ScoreMatrix, corner: Corner) -> (f64, Vec<Cell>) {
    let (rows, cols) = (m.rows() as isize, m.cols() as isize);
    let (dr, dc) = (corner.row_step(), corner.col_step());
    let row_order: Vec<isize> = if dr > 0 { (0..rows).collect() } else { (0..rows).rev().collect() };
    let col_order: Vec<isize> = if dc > 0 { (0..cols).collect() } else { (0..cols).rev().collect() };
    let mut best: HashMap<(isize, isize), (f64, BTreeSet<Cell>)> = HashMap::new();
    let mut answer: Option<(f64, Vec<Cell>)> = None;
    for &i in &row_order {
        for &j in &col_order {
            let here: Cell = (i as usize, j as usize);
            let h = best.get(&(i, j - dc)).cloned();
            let v = best.get(&(i - dr, j)).cloned();
            let mut options: Vec<BTreeSet<Cell>> = vec![BTreeSet::from([here])];
            if let Some((_, hs)) = &h {
                options.push(hs.iter().copied().chain([here]).collect());
            }
            if let Some((_, vs)) = &v {
                options.push(vs.iter().copied().chain([here]).collect());
            }
            if let (Some((_, hs)), Some((_, vs))) = (&h, &v) {
                options.push(hs.union(vs).copied().chain([here]).collect());
            }
            let sum = |set: &BTreeSet<Cell>| set.iter().map(|&(r, c)| m.get(r, c)).sum::<f64>();
            let mut chosen = options[0].clone();
            for o in &options[1..] {
                let (a, b) = (sum(o), sum(&chosen));
                if a > b || (a == b && o.len() < chosen.len()) {
                    chosen = o.clone();
                }
            }
            let score = sum(&chosen);
            let cells: Vec<Cell> = chosen.iter().copied().collect();
            let better = match &answer {
                None => true,
                Some((bs, bc)) => {
                    score > *bs || (score == *bs && (cells.len() < bc.len() || (cells.len() == bc.len() && cells < *bc)))
                }
            };
            if better {
                answer = Some((score, cells));
            }
            best.insert((i, j), (score, chosen));
        }
    }
    answer.unwrap()
}


pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i32, hi: i32) -> ScoreMatrix {
    let scores = (0..rows * cols).map(|_| rng.gen_range(lo..=hi) as f64).collect();
    ScoreMatrix::new(rows, cols, scores).unwrap()
}

/// Catalog of images whose tiles are drawn from a small palette of
/// prototype vectors plus noise, so that repeated content exists across
/// images. Background tiles carry little foreground.
pub fn random_catalog(rng: &mut ChaCha8Rng, images: usize, max_side: usize, dim: usize) -> Catalog {
    let palette: Vec<Vec<f64>> = (0..8)
        .map(|_| (0..dim).map(|_| rng.gen_range(0.0..2000.0)).collect())
        .collect();
    let imgs = (0..images)
        .map(|id| {
            let rows = rng.gen_range(1..=max_side);
            let cols = rng.gen_range(1..=max_side);
            let mut tiles = Vec::new();
            let mut bgs = Vec::new();
            for _ in 0..rows * cols {
                let p = rng.gen_range(0..palette.len());
                let v: Vec<f64> = palette[p].iter().map(|x| x + rng.gen_range(-100.0..100.0)).collect();
                tiles.push(FeatureVector::new(v).unwrap());
                bgs.push(if p < 3 { rng.gen_range(0.0..5000.0) } else { rng.gen_range(20000.0..40000.0) });
            }
            TiledImage::new(id, rows, cols, tiles, bgs, format!("img{id}")).unwrap()
        })
        .collect();
    Catalog::new(imgs).unwrap()
}

/// Query cut from a catalog image, perturbed slightly.
pub fn random_query(rng: &mut ChaCha8Rng, catalog: &Catalog, rows: usize, cols: usize) -> QueryImage {
    let img = &catalog.images()[rng.gen_range(0..catalog.len())];
    let r0 = rng.gen_range(0..img.rows);
    let c0 = rng.gen_range(0..img.cols);
    let dim = img.dim();
    let tiles = (0..rows * cols)
        .map(|k| {
            let (r, c) = (r0 + k / cols, c0 + k % cols);
            if r < img.rows && c < img.cols {
                let v: Vec<f64> = img.tile(r, c).as_slice().iter().map(|x| x + rng.gen_range(-20.0..20.0)).collect();
                QueryTile::new(FeatureVector::new(v).unwrap(), img.bg_distance(r, c)).unwrap()
            } else {
                let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..2000.0)).collect();
                QueryTile::new(FeatureVector::new(v).unwrap(), rng.gen_range(0.0..40000.0)).unwrap()
            }
        })
        .collect();
    QueryImage::new(rows, cols, tiles).unwrap()
}
