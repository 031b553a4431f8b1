//! Seeded synthetic corpora: textured regions of interest placed on black or
//! gray canvases, optionally occluded, with a ground-truth file that tags
//! every placement and every query.
//!
//! Placements sit on the tile grid, so an unoccluded copy of a region has
//! exactly the tiles of its query.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use subregion::features::GrayImage;

use crate::error::{CliError, CliResult};
use crate::pgm::write_pgm;

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

/// Pixel side of the uniform texture blocks inside a sprite.
const BLOCK: usize = 4;
/// Levels per sprite palette.
const PALETTE: usize = 4;
/// Quantization step of the palette levels; levels sit mid-step.
const STEP: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RoiSpec {
    pub label: String,
    /// Extent in tiles.
    pub rows: usize,
    pub cols: usize,
    /// Placed only with a non-zero occlusion.
    #[serde(default)]
    pub occluded_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SyntheticSpec {
    pub seed: u64,
    pub images: usize,
    /// Canvas size in pixels; multiples of the tile size.
    pub width: usize,
    pub height: usize,
    #[serde(default = "default_tile_size")]
    pub tile_size: usize,
    /// `"black"` or `"gray"`.
    pub backgrounds: Vec<String>,
    /// Occluded share of a placement's width, in percent.
    pub occlusions: Vec<u32>,
    #[serde(default = "default_max_placements")]
    pub max_placements: usize,
    pub queries: usize,
    #[serde(rename = "roi")]
    pub rois: Vec<RoiSpec>,
    /// Label pairs placed side by side, left then right.
    #[serde(default)]
    pub composites: Vec<[String; 2]>,
}

fn default_tile_size() -> usize {
    32
}

fn default_max_placements() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    /// Top edge; pixel rows grow downwards.
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn intersects(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> bool {
        let (ax0, ay0) = (self.x as i64, self.y as i64);
        let (ax1, ay1) = (ax0 + self.w as i64, ay0 + self.h as i64);
        ax0 < x1 && x0 < ax1 && ay0 < y1 && y0 < ay1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub label: String,
    pub rect: Rect,
    /// Part of `rect` left uncovered by the occluder.
    pub visible: Rect,
    pub occlusion: u32,
    /// Set when the placement is half of a composite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composite: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtImage {
    pub file: String,
    pub width: usize,
    pub height: usize,
    pub background: u8,
    pub placements: Vec<Placement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryKind {
    Single,
    Occluded,
    Composite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtQuery {
    pub file: String,
    pub labels: Vec<String>,
    pub kind: QueryKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub tile_size: usize,
    pub images: Vec<GtImage>,
    pub queries: Vec<GtQuery>,
}

impl GroundTruth {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn image(&self, file: &str) -> Option<&GtImage> {
        self.images.iter().find(|i| i.file == file)
    }

    pub fn query(&self, file: &str) -> Option<&GtQuery> {
        self.queries.iter().find(|q| q.file == file)
    }
}

/// A generated corpus, before it is written out.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub images: Vec<GrayImage>,
    pub queries: Vec<GrayImage>,
    pub truth: GroundTruth,
}

impl SyntheticSpec {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// 50 images on 8x8-tile canvases with six plain labels, one label seen
    /// only occluded, two composites and ten queries.
    pub fn desk_default(seed: u64) -> Self {
        let roi = |label: &str, rows, cols, occluded_only| RoiSpec {
            label: label.into(),
            rows,
            cols,
            occluded_only,
        };
        SyntheticSpec {
            seed,
            images: 50,
            width: 256,
            height: 256,
            tile_size: 32,
            backgrounds: vec!["black".into(), "gray".into()],
            occlusions: vec![0, 25, 50],
            max_placements: 2,
            queries: 10,
            rois: vec![
                roi("disc", 2, 2, false),
                roi("bar", 1, 3, false),
                roi("block", 2, 2, false),
                roi("column", 3, 1, false),
                roi("patch", 2, 3, false),
                roi("stripe", 1, 2, false),
                roi("hidden", 2, 2, true),
            ],
            composites: vec![["disc".into(), "block".into()], ["bar".into(), "stripe".into()]],
        }
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(format!("synthetic spec: {m}")));
        if self.tile_size == 0 || self.width == 0 || self.height == 0 {
            return bad("canvas and tile sizes must be positive".into());
        }
        if !self.width.is_multiple_of(self.tile_size) || !self.height.is_multiple_of(self.tile_size) {
            return bad(format!("canvas {}x{} is not a whole number of tiles", self.width, self.height));
        }
        if self.rois.is_empty() {
            return bad("at least one roi is required".into());
        }
        if self.max_placements == 0 {
            return bad("max-placements must be at least 1".into());
        }
        if self.rois.iter().all(|r| r.occluded_only) {
            return bad("at least one roi must allow unoccluded placement".into());
        }
        if self.occlusions.is_empty() || self.occlusions.iter().any(|&o| o >= 100) {
            return bad("occlusions must be non-empty percentages below 100".into());
        }
        if self.rois.iter().any(|r| r.occluded_only) && self.occlusions.iter().all(|&o| o == 0) {
            return bad("occluded-only rois need a non-zero occlusion".into());
        }
        if self.backgrounds.is_empty() {
            return bad("at least one background is required".into());
        }
        for b in &self.backgrounds {
            background_level(b)?;
        }
        if self.rois.len() > palette_bins().len() / PALETTE {
            return bad(format!("at most {} rois are supported", palette_bins().len() / PALETTE));
        }
        let (grid_rows, grid_cols) = (self.height / self.tile_size, self.width / self.tile_size);
        for (k, r) in self.rois.iter().enumerate() {
            if self.rois[..k].iter().any(|o| o.label == r.label) {
                return bad(format!("label {:?} is repeated", r.label));
            }
            if r.rows == 0 || r.cols == 0 {
                return bad(format!("roi {:?} is empty", r.label));
            }
            if r.rows > grid_rows || r.cols > grid_cols {
                return bad(format!("roi {:?} is larger than the canvas", r.label));
            }
        }
        for [a, b] in &self.composites {
            let (ra, rb) = (self.roi(a), self.roi(b));
            let (Some(ra), Some(rb)) = (ra, rb) else {
                return bad(format!("composite {a}+{b} names an unknown label"));
            };
            if ra.occluded_only || rb.occluded_only {
                return bad(format!("composite {a}+{b} uses an occluded-only label"));
            }
            if ra.rows.max(rb.rows) > grid_rows || ra.cols + rb.cols > grid_cols {
                return bad(format!("composite {a}+{b} is larger than the canvas"));
            }
        }
        Ok(())
    }

    fn roi(&self, label: &str) -> Option<&RoiSpec> {
        self.rois.iter().find(|r| r.label == label)
    }
}

fn background_level(name: &str) -> CliResult<u8> {
    match name.to_ascii_lowercase().as_str() {
        "black" => Ok(0),
        "gray" | "grey" => Ok(128),
        other => Err(CliError::Usage(format!("synthetic spec: unknown background {other:?}"))),
    }
}

/// Quantization steps available to sprite palettes: bright enough to stand
/// out from black, and clear of the gray background level.
fn palette_bins() -> Vec<usize> {
    (8..256 / STEP).filter(|&b| b != 128 / STEP).collect()
}

#[derive(Debug, Clone)]
struct Sprite {
    w: usize,
    h: usize,
    pixels: Vec<u8>,
}

fn make_sprites(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<Sprite> {
    let mut bins = palette_bins();
    bins.shuffle(rng);
    spec.rois
        .iter()
        .enumerate()
        .map(|(k, roi)| {
            let palette: Vec<u8> = bins[k * PALETTE..(k + 1) * PALETTE]
                .iter()
                .map(|&b| (b * STEP + STEP / 2) as u8)
                .collect();
            let (w, h) = (roi.cols * spec.tile_size, roi.rows * spec.tile_size);
            let (bw, bh) = (w.div_ceil(BLOCK), h.div_ceil(BLOCK));
            let blocks: Vec<u8> = (0..bw * bh).map(|_| palette[rng.gen_range(0..PALETTE)]).collect();
            let pixels = (0..w * h)
                .map(|i| blocks[(i / w / BLOCK) * bw + (i % w) / BLOCK])
                .collect();
            Sprite { w, h, pixels }
        })
        .collect()
}

fn blit(canvas: &mut GrayImage, sprite: &Sprite, x: usize, y: usize) {
    for sy in 0..sprite.h {
        for sx in 0..sprite.w {
            canvas.set(x + sx, y + sy, sprite.pixels[sy * sprite.w + sx]);
        }
    }
}

/// Fills the right `percent` of the rect with `level` and returns what stays visible.
fn occlude(canvas: &mut GrayImage, rect: Rect, percent: u32, level: u8) -> Rect {
    let hidden = (rect.w * percent as usize + 50) / 100;
    for y in rect.y..rect.y + rect.h {
        for x in rect.x + rect.w - hidden..rect.x + rect.w {
            canvas.set(x, y, level);
        }
    }
    Rect {
        w: rect.w - hidden,
        ..rect
    }
}

/// Tile-aligned free spot for a `rows x cols` block, marking it taken.
fn find_spot(taken: &mut [bool], grid: (usize, usize), size: (usize, usize), rng: &mut ChaCha8Rng) -> Option<(usize, usize)> {
    let (grid_rows, grid_cols) = grid;
    let (rows, cols) = size;
    let mut spots: Vec<(usize, usize)> = (0..=grid_rows - rows)
        .flat_map(|r| (0..=grid_cols - cols).map(move |c| (r, c)))
        .filter(|&(r, c)| (r..r + rows).all(|i| (c..c + cols).all(|j| !taken[i * grid_cols + j])))
        .collect();
    if spots.is_empty() {
        return None;
    }
    spots.shuffle(rng);
    let (r, c) = spots[0];
    for i in r..r + rows {
        for j in c..c + cols {
            taken[i * grid_cols + j] = true;
        }
    }
    Some((r, c))
}

#[derive(Clone, Copy)]
enum Item {
    Roi(usize),
    Composite(usize),
}

pub fn generate(spec: &SyntheticSpec) -> CliResult<Corpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sprites = make_sprites(spec, &mut rng);
    let ts = spec.tile_size;
    let grid = (spec.height / ts, spec.width / ts);
    let plain: Vec<usize> = (0..spec.rois.len()).filter(|&k| !spec.rois[k].occluded_only).collect();
    let hidden: Vec<usize> = (0..spec.rois.len()).filter(|&k| spec.rois[k].occluded_only).collect();
    let nonzero: Vec<u32> = spec.occlusions.iter().copied().filter(|&o| o > 0).collect();
    let index_of = |label: &str| spec.rois.iter().position(|r| r.label == label).expect("validated label");

    // The first images carry one of every label and composite so each query
    // has at least one true match.
    let mut mandatory: Vec<Item> = (0..spec.rois.len()).map(Item::Roi).collect();
    mandatory.extend((0..spec.composites.len()).map(Item::Composite));

    let mut images = Vec::with_capacity(spec.images);
    let mut gt_images = Vec::with_capacity(spec.images);
    for n in 0..spec.images {
        let bg_name = &spec.backgrounds[rng.gen_range(0..spec.backgrounds.len())];
        let level = background_level(bg_name)?;
        let mut canvas = GrayImage::filled(spec.width, spec.height, level)?;
        let mut taken = vec![false; grid.0 * grid.1];
        let mut items = Vec::new();
        if let Some(&item) = mandatory.get(n) {
            items.push(item);
        }
        if !spec.composites.is_empty() && rng.gen_bool(0.15) {
            items.push(Item::Composite(rng.gen_range(0..spec.composites.len())));
        }
        if !hidden.is_empty() && rng.gen_bool(0.2) {
            items.push(Item::Roi(hidden[rng.gen_range(0..hidden.len())]));
        }
        for _ in 0..rng.gen_range(1..=spec.max_placements) {
            items.push(Item::Roi(plain[rng.gen_range(0..plain.len())]));
        }

        let mut placements = Vec::new();
        for item in items {
            let parts: Vec<usize> = match item {
                Item::Roi(k) => vec![k],
                Item::Composite(k) => spec.composites[k].iter().map(|l| index_of(l)).collect(),
            };
            let rows = parts.iter().map(|&k| spec.rois[k].rows).max().unwrap_or(0);
            let cols = parts.iter().map(|&k| spec.rois[k].cols).sum();
            let Some((r, c)) = find_spot(&mut taken, grid, (rows, cols), &mut rng) else {
                continue;
            };
            let composite = match item {
                Item::Composite(k) => Some(spec.composites[k].join("+")),
                Item::Roi(_) => None,
            };
            let mut x = c * ts;
            for k in parts {
                let roi = &spec.rois[k];
                let y = (r + rows - roi.rows) * ts;
                let rect = Rect {
                    x,
                    y,
                    w: roi.cols * ts,
                    h: roi.rows * ts,
                };
                blit(&mut canvas, &sprites[k], x, y);
                let occlusion = if composite.is_some() {
                    0
                } else if roi.occluded_only {
                    nonzero[rng.gen_range(0..nonzero.len())]
                } else {
                    spec.occlusions[rng.gen_range(0..spec.occlusions.len())]
                };
                let visible = occlude(&mut canvas, rect, occlusion, level);
                placements.push(Placement {
                    label: roi.label.clone(),
                    rect,
                    visible,
                    occlusion,
                    composite: composite.clone(),
                });
                x += rect.w;
            }
        }
        images.push(canvas);
        gt_images.push(GtImage {
            file: format!("img_{n:03}.pgm"),
            width: spec.width,
            height: spec.height,
            background: level,
            placements,
        });
    }

    let mut kinds: Vec<(Vec<usize>, QueryKind)> = plain.iter().map(|&k| (vec![k], QueryKind::Single)).collect();
    kinds.extend(hidden.iter().map(|&k| (vec![k], QueryKind::Occluded)));
    kinds.extend(
        spec.composites
            .iter()
            .map(|pair| (pair.iter().map(|l| index_of(l)).collect(), QueryKind::Composite)),
    );
    let mut queries = Vec::with_capacity(spec.queries);
    let mut gt_queries = Vec::with_capacity(spec.queries);
    for n in 0..spec.queries {
        let (parts, kind) = &kinds[n % kinds.len()];
        let rows = parts.iter().map(|&k| spec.rois[k].rows).max().unwrap_or(0);
        let cols: usize = parts.iter().map(|&k| spec.rois[k].cols).sum();
        let mut canvas = GrayImage::filled((cols + 2) * ts, (rows + 2) * ts, 0)?;
        let mut x = ts;
        for &k in parts {
            blit(&mut canvas, &sprites[k], x, ts + (rows - spec.rois[k].rows) * ts);
            x += sprites[k].w;
        }
        queries.push(canvas);
        gt_queries.push(GtQuery {
            file: format!("query_{n:02}.pgm"),
            labels: parts.iter().map(|&k| spec.rois[k].label.clone()).collect(),
            kind: *kind,
        });
    }

    Ok(Corpus {
        images,
        queries,
        truth: GroundTruth {
            tile_size: ts,
            images: gt_images,
            queries: gt_queries,
        },
    })
}

/// Writes `images/`, `queries/` and the ground-truth file under `out`.
pub fn write_corpus(corpus: &Corpus, out: &Path) -> CliResult<()> {
    let (img_dir, q_dir) = (out.join("images"), out.join("queries"));
    for d in [&img_dir, &q_dir] {
        std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
    }
    for (img, gt) in corpus.images.iter().zip(&corpus.truth.images) {
        write_pgm(&img_dir.join(&gt.file), img)?;
    }
    for (img, gt) in corpus.queries.iter().zip(&corpus.truth.queries) {
        write_pgm(&q_dir.join(&gt.file), img)?;
    }
    let json = serde_json::to_string_pretty(&corpus.truth).map_err(|e| CliError::Data(e.to_string()))?;
    let path = out.join(GROUND_TRUTH_FILE);
    std::fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))
}

/// Placements per label over the whole corpus.
pub fn label_counts(truth: &GroundTruth) -> BTreeMap<&str, usize> {
    let mut m = BTreeMap::new();
    for p in truth.images.iter().flat_map(|i| &i.placements) {
        *m.entry(p.label.as_str()).or_default() += 1;
    }
    m
}

/// Canvases of random textured rectangles on black or gray, used for
/// agreement and pruning runs where every tile position matters.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchCorpusSpec {
    pub seed: u64,
    pub images: usize,
    /// Canvas extent in tiles.
    pub rows: usize,
    pub cols: usize,
    pub tile_size: usize,
    /// Distinct textures shared by all images.
    pub palettes: usize,
    pub max_patches: usize,
}

impl PatchCorpusSpec {
    /// 200 images of 6x6 tiles.
    pub fn standard(seed: u64) -> Self {
        Self {
            seed,
            images: 200,
            rows: 6,
            cols: 6,
            tile_size: 32,
            palettes: 12,
            max_patches: 4,
        }
    }
}

fn textured_rect(img: &mut GrayImage, x: usize, y: usize, w: usize, h: usize, palette: &[u8], rng: &mut ChaCha8Rng) {
    for by in (y..y + h).step_by(BLOCK) {
        for bx in (x..x + w).step_by(BLOCK) {
            let v = palette[rng.gen_range(0..palette.len())];
            for py in by..(by + BLOCK).min(y + h) {
                for px in bx..(bx + BLOCK).min(x + w) {
                    img.set(px, py, v);
                }
            }
        }
    }
}

/// Named images; rectangles are 1-3 tiles on a side at arbitrary pixel offsets.
pub fn patch_corpus(spec: &PatchCorpusSpec) -> CliResult<Vec<(String, GrayImage)>> {
    if spec.images == 0 || spec.rows == 0 || spec.cols == 0 || spec.tile_size < BLOCK || spec.palettes == 0 {
        return Err(CliError::Usage("patch corpus needs images, tiles and palettes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let palettes: Vec<Vec<u8>> = (0..spec.palettes)
        .map(|_| (0..PALETTE).map(|_| rng.gen_range(40..=250)).collect())
        .collect();
    let ts = spec.tile_size;
    let (w, h) = (spec.cols * ts, spec.rows * ts);
    let mut out = Vec::with_capacity(spec.images);
    for n in 0..spec.images {
        let level = if rng.gen_bool(0.5) { 0 } else { 128 };
        let mut img = GrayImage::filled(w, h, level)?;
        for _ in 0..rng.gen_range(2..=spec.max_patches.max(2)) {
            let pw = rng.gen_range(1..=3.min(spec.cols)) * ts;
            let ph = rng.gen_range(1..=3.min(spec.rows)) * ts;
            let (x, y) = (rng.gen_range(0..=w - pw), rng.gen_range(0..=h - ph));
            let palette = &palettes[rng.gen_range(0..palettes.len())];
            textured_rect(&mut img, x, y, pw, ph, palette, &mut rng);
        }
        out.push((format!("img_{n:03}.pgm"), img));
    }
    Ok(out)
}

/// Tile-aligned crops of random images, sizes cycled in equal blocks, with
/// half the pixels brightened by up to 19 levels. Crops with less than a
/// quarter foreground are redrawn.
pub fn random_crops(
    images: &[(String, GrayImage)],
    tile_size: usize,
    sizes: &[(usize, usize)],
    count: usize,
    seed: u64,
) -> CliResult<Vec<(String, GrayImage)>> {
    if images.is_empty() || sizes.is_empty() {
        return Err(CliError::Usage("crops need images and sizes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let (rows, cols) = sizes[n * sizes.len() / count.max(1)];
        let (w, h) = (cols * tile_size, rows * tile_size);
        let crop = loop {
            let src = &images[rng.gen_range(0..images.len())].1;
            if src.width < w || src.height < h {
                return Err(CliError::Usage(format!("{rows}x{cols} crop is larger than an image")));
            }
            let x = rng.gen_range(0..=(src.width - w) / tile_size) * tile_size;
            let y = rng.gen_range(0..=(src.height - h) / tile_size) * tile_size;
            let crop = src.crop(x as isize, y as isize, w, h, 0)?;
            let level = src.get(0, 0).min(src.get(src.width - 1, src.height - 1));
            let foreground = crop.pixels().iter().filter(|&&p| p != 0 && p != 128 && p != level).count();
            if foreground * 4 >= crop.pixels().len() {
                break crop;
            }
        };
        let mut noisy = crop.clone();
        for y in 0..h {
            for x in 0..w {
                if rng.gen_bool(0.5) {
                    noisy.set(x, y, crop.get(x, y).saturating_add(rng.gen_range(0..20)));
                }
            }
        }
        out.push((format!("crop_{n:02}_{rows}x{cols}.pgm"), noisy));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_roi(occlusion: u32) -> SyntheticSpec {
        SyntheticSpec {
            seed: 3,
            images: 4,
            width: 128,
            height: 96,
            tile_size: 32,
            backgrounds: vec!["black".into()],
            occlusions: vec![occlusion],
            max_placements: 1,
            queries: 1,
            rois: vec![RoiSpec {
                label: "a".into(),
                rows: 2,
                cols: 2,
                occluded_only: false,
            }],
            composites: vec![],
        }
    }

    #[test]
    fn single_unoccluded_roi_per_image() {
        let c = generate(&one_roi(0)).unwrap();
        for (img, gt) in c.images.iter().zip(&c.truth.images) {
            // The mandatory item and the random one may both land.
            assert!(!gt.placements.is_empty());
            assert_eq!(gt.background, 0);
            for p in &gt.placements {
                assert_eq!(p.visible, p.rect);
                assert!(img.get(p.rect.x, p.rect.y) > 0);
            }
        }
        let spec = SyntheticSpec {
            max_placements: 1,
            ..one_roi(0)
        };
        let c = generate(&spec).unwrap();
        assert!(c.truth.images[1..].iter().all(|i| i.placements.len() == 1));
    }

    #[test]
    fn half_occlusion_covers_half_the_area() {
        let c = generate(&one_roi(50)).unwrap();
        for (img, gt) in c.images.iter().zip(&c.truth.images) {
            for p in &gt.placements {
                assert_eq!(p.visible.w * 2, p.rect.w);
                let covered = (p.rect.y..p.rect.y + p.rect.h)
                    .flat_map(|y| (p.rect.x..p.rect.x + p.rect.w).map(move |x| (x, y)))
                    .filter(|&(x, y)| img.get(x, y) == 0)
                    .count();
                assert_eq!(covered * 2, p.rect.w * p.rect.h);
            }
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let spec = SyntheticSpec::desk_default(11);
        let (a, b) = (generate(&spec).unwrap(), generate(&spec).unwrap());
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.images, b.images);
        assert_eq!(a.queries, b.queries);
        let other = generate(&SyntheticSpec::desk_default(12)).unwrap();
        assert_ne!(a.images, other.images);
    }

    #[test]
    fn oversized_roi_is_a_spec_error() {
        let mut spec = one_roi(0);
        spec.rois[0].rows = 4;
        let err = generate(&spec).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("larger than the canvas"));
    }

    #[test]
    fn patch_corpus_and_crops_are_seeded() {
        let spec = PatchCorpusSpec {
            images: 6,
            ..PatchCorpusSpec::standard(2)
        };
        let a = patch_corpus(&spec).unwrap();
        assert_eq!(a, patch_corpus(&spec).unwrap());
        assert!(a.iter().all(|(_, i)| i.width == 192 && i.height == 192));
        let sizes = [(2, 2), (4, 4)];
        let crops = random_crops(&a, 32, &sizes, 4, 9).unwrap();
        assert_eq!(crops, random_crops(&a, 32, &sizes, 4, 9).unwrap());
        let dims: Vec<_> = crops.iter().map(|(_, c)| (c.height, c.width)).collect();
        assert_eq!(dims, [(64, 64), (64, 64), (128, 128), (128, 128)]);
    }

    #[test]
    fn desk_default_covers_every_query_kind() {
        let c = generate(&SyntheticSpec::desk_default(1)).unwrap();
        let counts = label_counts(&c.truth);
        assert!(counts.len() == 7 && counts.values().all(|&n| n >= 1));
        for kind in [QueryKind::Single, QueryKind::Occluded, QueryKind::Composite] {
            assert!(c.truth.queries.iter().any(|q| q.kind == kind));
        }
        let hidden = c.truth.images.iter().flat_map(|i| &i.placements).filter(|p| p.label == "hidden");
        assert!(hidden.clone().all(|p| p.occlusion > 0));
        assert!(c.truth.images.iter().any(|i| i.background == 128));
    }
}
