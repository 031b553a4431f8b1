//! Domain types shared by every other module.
//!
//! Matrix coordinates are `(row, col)` with row 0 at the bottom, so a corner
//! run that starts at `(0, 0)` moves right and then up.

use std::collections::{HashSet, VecDeque};

use crate::error::{invalid, Error, Result};

/// A `(row, col)` coordinate in a score matrix or tile grid.
pub type Cell = (usize, usize);

/// A point in feature space describing one image tile.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("feature component {pos} is not finite"));
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Distance function used between feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    L1,
    #[default]
    L2,
}

impl Metric {
    /// Stable numeric id used in persisted headers.
    pub fn id(self) -> u8 {
        match self {
            Metric::L1 => 1,
            Metric::L2 => 2,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Metric::L1),
            2 => Some(Metric::L2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::L1 => "l1",
            Metric::L2 => "l2",
        }
    }

    /// Distance between two equally sized slices. Callers check dimensions.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let d = x - y;
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Folds per-dimension gaps into a distance, matching [`Metric::distance`]
    /// term by term so that a smaller gap vector never yields a larger value.
    pub(crate) fn fold_gaps(self, gaps: impl Iterator<Item = f64>) -> f64 {
        match self {
            Metric::L1 => gaps.sum(),
            Metric::L2 => gaps.map(|g| g * g).sum::<f64>().sqrt(),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Metric::L1),
            "l2" => Ok(Metric::L2),
            other => invalid(format!("unknown metric {other:?}")),
        }
    }
}

/// Position of one tile inside an image's tile grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileRef {
    pub image_id: usize,
    pub row: usize,
    pub col: usize,
}

/// A database image as a fully populated grid of tile feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TiledImage {
    pub id: usize,
    pub rows: usize,
    pub cols: usize,
    tiles: Vec<FeatureVector>,
    bg_distances: Vec<f64>,
    pub path: String,
}

impl TiledImage {
    /// `tiles` and `bg_distances` are row-major, row 0 first.
    pub fn new(
        id: usize,
        rows: usize,
        cols: usize,
        tiles: Vec<FeatureVector>,
        bg_distances: Vec<f64>,
        path: impl Into<String>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("tile grid must be at least 1x1");
        }
        if tiles.len() != rows * cols || bg_distances.len() != rows * cols {
            return invalid(format!(
                "expected {} tiles, got {} feature vectors and {} background distances",
                rows * cols,
                tiles.len(),
                bg_distances.len()
            ));
        }
        let dim = tiles[0].dim();
        if let Some(bad) = tiles.iter().find(|t| t.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if bg_distances.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return invalid("background distances must be finite and non-negative");
        }
        Ok(Self {
            id,
            rows,
            cols,
            tiles,
            bg_distances,
            path: path.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.tiles[0].dim()
    }

    pub fn tile(&self, row: usize, col: usize) -> &FeatureVector {
        &self.tiles[row * self.cols + col]
    }

    pub fn bg_distance(&self, row: usize, col: usize) -> f64 {
        self.bg_distances[row * self.cols + col]
    }

    pub fn tiles(&self) -> &[FeatureVector] {
        &self.tiles
    }

    pub fn bg_distances(&self) -> &[f64] {
        &self.bg_distances
    }

    pub fn tile_refs(&self) -> impl Iterator<Item = TileRef> + '_ {
        (0..self.rows).flat_map(move |row| {
            (0..self.cols).map(move |col| TileRef {
                image_id: self.id,
                row,
                col,
            })
        })
    }
}

/// One query tile: its features and its distance from the background tile.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTile {
    pub features: FeatureVector,
    pub bg_distance: f64,
}

impl QueryTile {
    pub fn new(features: FeatureVector, bg_distance: f64) -> Result<Self> {
        if !bg_distance.is_finite() || bg_distance < 0.0 {
            return invalid("background distance must be finite and non-negative");
        }
        Ok(Self {
            features,
            bg_distance,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryImage {
    pub rows: usize,
    pub cols: usize,
    tiles: Vec<QueryTile>,
}

impl QueryImage {
    pub fn new(rows: usize, cols: usize, tiles: Vec<QueryTile>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("query grid must be at least 1x1");
        }
        if tiles.len() != rows * cols {
            return invalid(format!(
                "expected {} query tiles, got {}",
                rows * cols,
                tiles.len()
            ));
        }
        let dim = tiles[0].features.dim();
        if let Some(bad) = tiles.iter().find(|t| t.features.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.features.dim(),
            });
        }
        Ok(Self { rows, cols, tiles })
    }

    /// Uses a database image as a query.
    pub fn from_tiled_image(image: &TiledImage) -> Self {
        let tiles = image
            .tiles
            .iter()
            .zip(&image.bg_distances)
            .map(|(f, &bg)| QueryTile {
                features: f.clone(),
                bg_distance: bg,
            })
            .collect();
        Self {
            rows: image.rows,
            cols: image.cols,
            tiles,
        }
    }

    /// Number of tiles.
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.tiles[0].features.dim()
    }

    pub fn tile(&self, row: usize, col: usize) -> &QueryTile {
        &self.tiles[row * self.cols + col]
    }

    pub fn tiles(&self) -> &[QueryTile] {
        &self.tiles
    }

    /// Grid position of the tile with flat index `i`.
    pub fn position(&self, i: usize) -> Cell {
        (i / self.cols, i % self.cols)
    }
}

/// A translation of the query grid over one database image.
///
/// Query cell `(r, c)` lands on image tile `(r + drow, c + dcol)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alignment {
    pub image_id: usize,
    pub drow: i64,
    pub dcol: i64,
}

/// The rectangle of aligned tile pairs induced by an [`Alignment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Overlap {
    pub query_row: usize,
    pub query_col: usize,
    pub image_row: usize,
    pub image_col: usize,
    pub rows: usize,
    pub cols: usize,
}

fn overlap_1d(q_len: usize, i_len: usize, offset: i64) -> Option<(usize, usize, usize)> {
    let start = 0i64.max(-offset);
    let end = (q_len as i64).min(i_len as i64 - offset);
    (end > start).then(|| {
        (
            start as usize,
            (start + offset) as usize,
            (end - start) as usize,
        )
    })
}

impl Alignment {
    pub fn new(image_id: usize, drow: i64, dcol: i64) -> Self {
        Self {
            image_id,
            drow,
            dcol,
        }
    }

    /// Overlap between a `q_rows x q_cols` query and an `i_rows x i_cols`
    /// image, or `None` when no tile pair is aligned.
    pub fn overlap(&self, q_rows: usize, q_cols: usize, i_rows: usize, i_cols: usize) -> Option<Overlap> {
        let (query_row, image_row, rows) = overlap_1d(q_rows, i_rows, self.drow)?;
        let (query_col, image_col, cols) = overlap_1d(q_cols, i_cols, self.dcol)?;
        Some(Overlap {
            query_row,
            query_col,
            image_row,
            image_col,
            rows,
            cols,
        })
    }
}

/// Where a score matrix came from, for actual alignments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixOrigin {
    pub alignment: Alignment,
    pub overlap: Overlap,
}

/// Rectangular grid of finite scores, row-major with row 0 at the bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    rows: usize,
    cols: usize,
    scores: Vec<f64>,
    origin: Option<MatrixOrigin>,
}

impl ScoreMatrix {
    pub fn new(rows: usize, cols: usize, scores: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("score matrix must be non-empty");
        }
        if scores.len() != rows * cols {
            return invalid(format!(
                "expected {} scores for a {rows}x{cols} matrix, got {}",
                rows * cols,
                scores.len()
            ));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return invalid("scores must be finite");
        }
        Ok(Self {
            rows,
            cols,
            scores,
            origin: None,
        })
    }

    /// Builds a matrix from row vectors; `rows[0]` is the bottom row.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return invalid("ragged rows");
        }
        let scores = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, scores)
    }

    pub fn with_origin(mut self, origin: MatrixOrigin) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.scores[row * self.cols + col]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn origin(&self) -> Option<&MatrixOrigin> {
        self.origin.as_ref()
    }

    pub fn max_entry(&self) -> f64 {
        self.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn check_cell(&self, (row, col): Cell) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }
}

/// A connected set of matrix cells and its cumulative score.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    cells: Vec<Cell>,
    pub score: f64,
}

impl Region {
    /// Builds a region over `matrix`, computing its score. Cells are sorted
    /// and deduplicated; the set must be non-empty and 4-connected.
    pub fn from_cells(matrix: &ScoreMatrix, cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let mut cells: Vec<Cell> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        if !is_connected(&cells)? {
            return invalid("region cells are not 4-connected");
        }
        let score = region_sum(matrix, &cells)?;
        Ok(Self { cells, score })
    }

    /// Sorted cells of the region.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub(crate) fn from_sorted_unchecked(cells: Vec<Cell>, score: f64) -> Self {
        Self { cells, score }
    }
}

/// One entry of a top-k result list.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedMatch {
    pub alignment: Alignment,
    pub overlap: Overlap,
    pub region: Region,
    pub score: f64,
}

impl RankedMatch {
    /// Region cells translated to image tile coordinates.
    pub fn image_cells(&self) -> Vec<Cell> {
        self.region
            .cells()
            .iter()
            .map(|&(r, c)| (self.overlap.image_row + r, self.overlap.image_col + c))
            .collect()
    }

    /// Region cells translated to query tile coordinates.
    pub fn query_cells(&self) -> Vec<Cell> {
        self.region
            .cells()
            .iter()
            .map(|&(r, c)| (self.overlap.query_row + r, self.overlap.query_col + c))
            .collect()
    }
}

/// The perfect background tile: every pixel at `level`. Pure black by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Background {
    pub level: u8,
}

/// Parameters of the discriminator score `bg_distance - lambda * r - c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringParams {
    pub lambda: f64,
    pub c: f64,
    pub background: Background,
}

impl ScoringParams {
    pub const DEFAULT_LAMBDA: f64 = 1.0;
    pub const DEFAULT_C: f64 = 23000.0;

    pub fn new(lambda: f64, c: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return invalid("lambda must be a positive finite number");
        }
        if !c.is_finite() {
            return invalid("c must be finite");
        }
        Ok(Self {
            lambda,
            c,
            background: Background::default(),
        })
    }

    pub fn with_background(mut self, background: Background) -> Self {
        self.background = background;
        self
    }
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            lambda: Self::DEFAULT_LAMBDA,
            c: Self::DEFAULT_C,
            background: Background::default(),
        }
    }
}

/// Exact sum of the referenced matrix entries.
pub fn region_sum(matrix: &ScoreMatrix, cells: &[Cell]) -> Result<f64> {
    let mut sum = 0.0;
    for &cell in cells {
        matrix.check_cell(cell)?;
        sum += matrix.get(cell.0, cell.1);
    }
    Ok(sum)
}

/// Whether `cells` forms a single 4-connected component. Duplicates are
/// ignored; an empty set is an error.
pub fn is_connected(cells: &[Cell]) -> Result<bool> {
    if cells.is_empty() {
        return invalid("connectivity of an empty cell set is undefined");
    }
    let set: HashSet<Cell> = cells.iter().copied().collect();
    let mut seen = HashSet::with_capacity(set.len());
    let mut queue = VecDeque::from([cells[0]]);
    seen.insert(cells[0]);
    while let Some((r, c)) = queue.pop_front() {
        let mut visit = |n: Cell| {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        };
        visit((r + 1, c));
        visit((r, c + 1));
        if r > 0 {
            visit((r - 1, c));
        }
        if c > 0 {
            visit((r, c - 1));
        }
    }
    Ok(seen.len() == set.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScoreMatrix {
        ScoreMatrix::from_rows(&[[5.0, -1.0], [-2.0, 3.0]]).unwrap()
    }

    /// 3x4 example, row 0 at the bottom. Tests name cells by 1-based
    /// labels, so label (r, c) is cell (r - 1, c - 1).
    fn shape_example() -> ScoreMatrix {
        ScoreMatrix::from_rows(&[
            [-1.0, -1.0, 10.0, -1.0],
            [-1.0, 10.0, 1.0, 35.0],
            [-1.0, -1.0, 40.0, -90.0],
        ])
        .unwrap()
    }

    fn label(r: usize, c: usize) -> Cell {
        (r - 1, c - 1)
    }

    #[test]
    fn region_sum_examples() {
        let m = small();
        assert_eq!(region_sum(&m, &[(0, 0)]).unwrap(), 5.0);
        assert_eq!(region_sum(&m, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap(), 5.0);
        let cells = [label(3, 3), label(2, 2), label(2, 3), label(2, 4), label(1, 3)];
        assert_eq!(region_sum(&shape_example(), &cells).unwrap(), 96.0);
    }

    #[test]
    fn region_sum_rejects_out_of_bounds() {
        let err = region_sum(&small(), &[(2, 0)]).unwrap_err();
        assert!(matches!(err, Error::OutOfBounds { row: 2, .. }));
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&[(0, 0)]).unwrap());
        assert!(!is_connected(&[(0, 0), (1, 1)]).unwrap());
        let cells = [label(3, 3), label(2, 3), label(2, 2), label(2, 4), label(1, 3)];
        assert!(is_connected(&cells).unwrap());
        assert!(is_connected(&[]).is_err());
    }

    #[test]
    fn overlap_clips_to_both_grids() {
        // 4x4 query shifted by one tile over a 4x4 image leaves a 3x3 overlap.
        let ov = Alignment::new(0, 1, -1).overlap(4, 4, 4, 4).unwrap();
        assert_eq!((ov.rows, ov.cols), (3, 3));
        assert_eq!((ov.query_row, ov.query_col), (0, 1));
        assert_eq!((ov.image_row, ov.image_col), (1, 0));
        assert!(Alignment::new(0, 4, 0).overlap(4, 4, 4, 4).is_none());
        assert!(Alignment::new(0, -4, 0).overlap(4, 4, 4, 4).is_none());
    }

    #[test]
    fn region_requires_connectivity() {
        let m = small();
        assert!(Region::from_cells(&m, [(0, 0), (1, 1)]).is_err());
        let r = Region::from_cells(&m, [(1, 1), (0, 0), (0, 1)]).unwrap();
        assert_eq!(r.cells(), &[(0, 0), (0, 1), (1, 1)]);
        assert_eq!(r.score, 7.0);
    }

    #[test]
    fn feature_vectors_reject_non_finite() {
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn scoring_params_require_positive_lambda() {
        assert!(ScoringParams::new(0.0, 1.0).is_err());
        assert!(ScoringParams::new(-1.0, 1.0).is_err());
        assert!(ScoringParams::new(1.0, 23000.0).is_ok());
    }
}
