//! Tiling, description, reduction and indexing of image files, and turning
//! query images into query grids.

use std::path::{Path, PathBuf};

use subregion::features::{
    csd_descriptor, energy_retained, pca_fit, pca_project, tile_image, DescriptorConfig, GrayImage,
};
use subregion::index::{Catalog, SpatialIndex};
use subregion::scoring::bg_distance;
use subregion::search::SearchConfig;
use subregion::{Background, FeatureVector, QueryImage, QueryTile, TiledImage};

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::persist::{IndexFile, IndexHeader, FORMAT_VERSION};
use crate::pgm::read_pgm;

/// Raw descriptors and background distances of one image's tiles,
/// row-major with tile row 0 at the bottom.
#[derive(Debug, Clone)]
pub struct DescribedImage {
    pub rows: usize,
    pub cols: usize,
    pub raw: Vec<FeatureVector>,
    pub bg: Vec<f64>,
}

pub fn descriptor_config(settings: &Settings) -> DescriptorConfig {
    DescriptorConfig {
        tile_size: settings.tile_size,
        ..DescriptorConfig::default()
    }
}

pub fn describe_image(img: &GrayImage, cfg: &DescriptorConfig, background: Background) -> CliResult<DescribedImage> {
    let grid = tile_image(img, cfg.tile_size)?;
    let mut raw = Vec::with_capacity(grid.tiles().len());
    let mut bg = Vec::with_capacity(grid.tiles().len());
    for tile in grid.tiles() {
        raw.push(csd_descriptor(tile, cfg)?);
        bg.push(bg_distance(tile, cfg.tile_size, background)?);
    }
    Ok(DescribedImage {
        rows: grid.rows,
        cols: grid.cols,
        raw,
        bg,
    })
}

#[derive(Debug, Clone, Default)]
pub struct BuildReport {
    pub images: usize,
    pub tiles: usize,
    pub skipped: Vec<(PathBuf, String)>,
    pub energy_retained: f64,
    pub depth: usize,
}

/// `.pgm` files of `dir` in name order.
pub fn list_pgm(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in rd {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Indexes every readable PGM in `dir`; unreadable files are skipped and
/// reported.
pub fn build_index(dir: &Path, settings: &Settings) -> CliResult<(IndexFile, BuildReport)> {
    let files = list_pgm(dir)?;
    if files.is_empty() {
        return Err(CliError::Data(format!("no .pgm images in {}", dir.display())));
    }
    let mut images = Vec::with_capacity(files.len());
    let mut skipped = Vec::new();
    for path in files {
        match read_pgm(&path) {
            Ok(img) => {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                images.push((name, img));
            }
            Err(e) => skipped.push((path, e.to_string())),
        }
    }
    if images.is_empty() {
        return Err(CliError::Data(format!("no readable images in {}", dir.display())));
    }
    let (file, mut report) = build_from_images(&images, settings)?;
    report.skipped = skipped;
    Ok((file, report))
}

/// Builds an index over in-memory images; ids follow the slice order.
pub fn build_from_images(images: &[(String, GrayImage)], settings: &Settings) -> CliResult<(IndexFile, BuildReport)> {
    settings.validate()?;
    let cfg = descriptor_config(settings);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if settings.dim > cfg.output_dim {
        return Err(CliError::Usage(format!(
            "dim {} exceeds the descriptor dimension {}",
            settings.dim, cfg.output_dim
        )));
    }
    let background = Background {
        level: settings.background,
    };
    let described = images
        .iter()
        .map(|(_, img)| describe_image(img, &cfg, background))
        .collect::<CliResult<Vec<_>>>()?;
    let all_raw: Vec<FeatureVector> = described.iter().flat_map(|d| d.raw.iter().cloned()).collect();
    if all_raw.len() < 2 {
        return Err(CliError::Data("at least two tiles are needed to fit the projection".into()));
    }
    let pca = pca_fit(&all_raw, settings.dim)?;

    let mut tiled = Vec::with_capacity(images.len());
    for (id, ((path, _), d)) in images.iter().zip(described).enumerate() {
        let reduced = d.raw.iter().map(|v| pca_project(&pca, v)).collect::<Result<Vec<_>, _>>()?;
        tiled.push(TiledImage::new(id, d.rows, d.cols, reduced, d.bg, path.clone())?);
    }
    let catalog = Catalog::new(tiled)?;
    let index = SpatialIndex::from_catalog(&catalog, settings.capacity, settings.metric)?;
    let header = IndexHeader {
        version: FORMAT_VERSION,
        metric: settings.metric,
        tile_size: settings.tile_size as u32,
        raw_dim: cfg.output_dim as u32,
        reduced_dim: settings.dim as u32,
        lambda: settings.lambda,
        c: settings.c,
        image_count: catalog.len() as u64,
        tile_count: catalog.tile_count() as u64,
        capacity: settings.capacity as u32,
        bins: cfg.bins as u32,
        window: cfg.window as u32,
        background: settings.background,
    };
    let report = BuildReport {
        images: catalog.len(),
        tiles: catalog.tile_count(),
        skipped: Vec::new(),
        energy_retained: energy_retained(&pca),
        depth: index.depth(),
    };
    Ok((
        IndexFile {
            header,
            pca,
            catalog,
            index,
        },
        report,
    ))
}

impl IndexFile {
    pub fn descriptor_config(&self) -> DescriptorConfig {
        DescriptorConfig {
            tile_size: self.header.tile_size as usize,
            bins: self.header.bins as usize,
            window: self.header.window as usize,
            output_dim: self.header.raw_dim as usize,
        }
    }

    /// Tiles, describes and projects a query image like the indexed ones.
    pub fn query_from_image(&self, img: &GrayImage) -> CliResult<QueryImage> {
        let background = Background {
            level: self.header.background,
        };
        let d = describe_image(img, &self.descriptor_config(), background)?;
        let tiles = d
            .raw
            .iter()
            .zip(&d.bg)
            .map(|(v, &bg)| Ok(QueryTile::new(pca_project(&self.pca, v)?, bg)?))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(QueryImage::new(d.rows, d.cols, tiles)?)
    }

    /// Search settings for this index. Settings that change how tiles were
    /// described or compared must agree with the header.
    pub fn search_config(&self, settings: &Settings, explicit: &ExplicitIndexSettings) -> CliResult<SearchConfig> {
        let h = &self.header;
        let clash = |what: &str, ours: String, theirs: String| {
            Err(CliError::Usage(format!("{what} {ours} does not match the index ({theirs})")))
        };
        if explicit.metric && settings.metric != h.metric {
            return clash("metric", settings.metric.name().into(), h.metric.name().into());
        }
        if explicit.dim && settings.dim != h.reduced_dim as usize {
            return clash("dim", settings.dim.to_string(), h.reduced_dim.to_string());
        }
        if explicit.tile_size && settings.tile_size != h.tile_size as usize {
            return clash("tile size", settings.tile_size.to_string(), h.tile_size.to_string());
        }
        Ok(SearchConfig {
            k: settings.k,
            params: subregion::ScoringParams {
                lambda: settings.lambda,
                c: settings.c,
                background: Background { level: h.background },
            },
            metric: h.metric,
            mode: settings.mode,
        })
    }
}

/// Which index-shaping settings the user set explicitly for a query.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExplicitIndexSettings {
    pub metric: bool,
    pub dim: bool,
    pub tile_size: bool,
}
