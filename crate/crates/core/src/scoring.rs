//! The discriminator score and the score matrices built from it.
//!
//! A query tile `q` matched against a database tile at feature distance `r`
//! scores `bg_distance(q) - lambda * r - c`: tiles that carry little
//! foreground score negatively no matter how close the match is.

use crate::error::{invalid, Error, Result};
use crate::features::RawTile;
use crate::model::{
    Alignment, Background, MatrixOrigin, Metric, QueryImage, QueryTile, ScoreMatrix, ScoringParams,
    TiledImage,
};
use crate::mwcs;

/// How an upper bound on the best region of a matrix is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundMode {
    /// Score of the DP heuristic on the bound matrix.
    #[default]
    PaperDp,
    /// Sum of positive entries, or the largest entry if none is positive.
    /// Never below the exact best connected region.
    SafePositiveSum,
}

impl BoundMode {
    pub fn name(self) -> &'static str {
        match self {
            BoundMode::PaperDp => "paper-dp",
            BoundMode::SafePositiveSum => "safe",
        }
    }
}

impl std::str::FromStr for BoundMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" | "paper-dp" | "paperdp" | "dp" => Ok(BoundMode::PaperDp),
            "safe" | "safe-positive-sum" | "safepositivesum" => Ok(BoundMode::SafePositiveSum),
            other => invalid(format!("unknown bound mode {other:?}")),
        }
    }
}

#[inline]
pub(crate) fn score_at(bg_distance: f64, r: f64, params: &ScoringParams) -> f64 {
    bg_distance - params.lambda * r - params.c
}

/// Score of query tile `q` against a database tile at distance `r`.
pub fn tile_score(q: &QueryTile, r: f64, params: &ScoringParams) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return invalid(format!("distance must be finite and non-negative, got {r}"));
    }
    if params.lambda.is_nan() || params.lambda <= 0.0 {
        return invalid("lambda must be positive");
    }
    Ok(score_at(q.bg_distance, r, params))
}

/// L1 distance between a raw tile and the uniform background tile; with the
/// default black background this is the plain pixel sum.
pub fn bg_distance(tile: &RawTile, tile_size: usize, background: Background) -> Result<f64> {
    if tile.size != tile_size {
        return invalid(format!(
            "tile is {0}x{0}, expected {1}x{1}",
            tile.size, tile_size
        ));
    }
    let level = background.level as i64;
    Ok(tile
        .pixels()
        .iter()
        .map(|&p| (p as i64 - level).unsigned_abs())
        .sum::<u64>() as f64)
}

/// Score matrix over the tile pairs aligned by `alignment`.
pub fn score_matrix_actual(
    query: &QueryImage,
    image: &TiledImage,
    alignment: Alignment,
    params: &ScoringParams,
    metric: Metric,
) -> Result<ScoreMatrix> {
    if alignment.image_id != image.id {
        return invalid(format!(
            "alignment targets image {} but image {} was supplied",
            alignment.image_id, image.id
        ));
    }
    if query.dim() != image.dim() {
        return Err(Error::DimensionMismatch {
            expected: image.dim(),
            found: query.dim(),
        });
    }
    let overlap = alignment
        .overlap(query.rows, query.cols, image.rows, image.cols)
        .ok_or_else(|| Error::InvalidArgument(format!("{alignment:?} has an empty overlap")))?;
    let mut scores = Vec::with_capacity(overlap.rows * overlap.cols);
    for i in 0..overlap.rows {
        for j in 0..overlap.cols {
            let q = query.tile(overlap.query_row + i, overlap.query_col + j);
            let t = image.tile(overlap.image_row + i, overlap.image_col + j);
            let r = metric.distance(q.features.as_slice(), t.as_slice());
            scores.push(score_at(q.bg_distance, r, params));
        }
    }
    Ok(ScoreMatrix::new(overlap.rows, overlap.cols, scores)?.with_origin(MatrixOrigin {
        alignment,
        overlap,
    }))
}

/// Query-shaped matrix where every tile is matched at distance `d`.
pub fn score_matrix_uniform(query: &QueryImage, d: f64, params: &ScoringParams) -> Result<ScoreMatrix> {
    if !(d.is_finite() && d >= 0.0) {
        return invalid(format!("distance must be finite and non-negative, got {d}"));
    }
    let scores = query
        .tiles()
        .iter()
        .map(|q| score_at(q.bg_distance, d, params))
        .collect();
    ScoreMatrix::new(query.rows, query.cols, scores)
}

/// Query-shaped matrix where tile `i` is matched at `distances[i]`.
pub fn tars_threshold_matrix(
    query: &QueryImage,
    distances: &[f64],
    params: &ScoringParams,
) -> Result<ScoreMatrix> {
    if distances.len() != query.len() {
        return invalid(format!(
            "expected {} distances, got {}",
            query.len(),
            distances.len()
        ));
    }
    let mut scores = Vec::with_capacity(distances.len());
    for (q, &d) in query.tiles().iter().zip(distances) {
        if !(d.is_finite() && d >= 0.0) {
            return invalid(format!("distance must be finite and non-negative, got {d}"));
        }
        scores.push(score_at(q.bg_distance, d, params));
    }
    ScoreMatrix::new(query.rows, query.cols, scores)
}

/// Upper bound on the best region of `m` under `mode`.
pub fn upper_bound(m: &ScoreMatrix, mode: BoundMode) -> f64 {
    match mode {
        BoundMode::PaperDp => mwcs::dp_max_region(m).score,
        BoundMode::SafePositiveSum => safe_positive_sum(m.scores()),
    }
}

pub(crate) fn safe_positive_sum(scores: &[f64]) -> f64 {
    let mut pos = 0.0;
    let mut any = false;
    let mut max = f64::NEG_INFINITY;
    for &s in scores {
        if s > 0.0 {
            pos += s;
            any = true;
        }
        max = max.max(s);
    }
    if any {
        pos
    } else {
        max
    }
}
