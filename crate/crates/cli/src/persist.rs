//! Single-file little-endian index format.
//!
//! Layout: header, PCA block, image catalog (paths, grid extents and
//! per-tile background distances), leaf entries (reduced vectors with their
//! tile references), tree topology. Catalog tile vectors are rebuilt from
//! the leaf entries on load.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use subregion::features::PcaModel;
use subregion::index::{Catalog, LeafEntry, Mbr, Node, NodeKind, SpatialIndex};
use subregion::{FeatureVector, Metric, TileRef, TiledImage};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 8] = b"SUBRSRCH";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct IndexHeader {
    pub version: u32,
    pub metric: Metric,
    pub tile_size: u32,
    pub raw_dim: u32,
    pub reduced_dim: u32,
    pub lambda: f64,
    pub c: f64,
    pub image_count: u64,
    pub tile_count: u64,
    pub capacity: u32,
    pub bins: u32,
    pub window: u32,
    pub background: u8,
}

/// Everything a query needs: projection, catalog and tree.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFile {
    pub header: IndexHeader,
    pub pca: PcaModel,
    pub catalog: Catalog,
    pub index: SpatialIndex,
}

fn corrupt(msg: impl Into<String>) -> CliError {
    CliError::Data(format!("corrupt index file: {}", msg.into()))
}

fn read_err(e: std::io::Error) -> CliError {
    corrupt(e.to_string())
}

fn write_f64s(w: &mut Vec<u8>, v: &[f64]) {
    for &x in v {
        w.write_f64::<LE>(x).expect("vec write");
    }
}

fn read_f64s(r: &mut impl Read, n: usize) -> CliResult<Vec<f64>> {
    let mut v = vec![0.0; n];
    r.read_f64_into::<LE>(&mut v).map_err(read_err)?;
    Ok(v)
}

fn read_len(r: &mut impl Read, limit: u64, what: &str) -> CliResult<usize> {
    let n = r.read_u64::<LE>().map_err(read_err)?;
    if n > limit {
        return Err(corrupt(format!("{what} count {n} is implausible")));
    }
    Ok(n as usize)
}

impl IndexFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        let h = &self.header;
        w.extend_from_slice(MAGIC);
        w.write_u32::<LE>(h.version).unwrap();
        w.write_u8(h.metric.id()).unwrap();
        w.write_u32::<LE>(h.tile_size).unwrap();
        w.write_u32::<LE>(h.raw_dim).unwrap();
        w.write_u32::<LE>(h.reduced_dim).unwrap();
        w.write_f64::<LE>(h.lambda).unwrap();
        w.write_f64::<LE>(h.c).unwrap();
        w.write_u64::<LE>(h.image_count).unwrap();
        w.write_u64::<LE>(h.tile_count).unwrap();
        w.write_u32::<LE>(h.capacity).unwrap();
        w.write_u32::<LE>(h.bins).unwrap();
        w.write_u32::<LE>(h.window).unwrap();
        w.write_u8(h.background).unwrap();

        write_f64s(&mut w, self.pca.mean());
        for axis in self.pca.components() {
            write_f64s(&mut w, axis);
        }
        write_f64s(&mut w, self.pca.eigenvalues());
        w.write_f64::<LE>(self.pca.total_variance()).unwrap();

        for img in self.catalog.images() {
            w.write_u64::<LE>(img.id as u64).unwrap();
            w.write_u32::<LE>(img.path.len() as u32).unwrap();
            w.extend_from_slice(img.path.as_bytes());
            w.write_u32::<LE>(img.rows as u32).unwrap();
            w.write_u32::<LE>(img.cols as u32).unwrap();
            write_f64s(&mut w, img.bg_distances());
        }

        for e in self.index.entries() {
            w.write_u64::<LE>(e.tile.image_id as u64).unwrap();
            w.write_u32::<LE>(e.tile.row as u32).unwrap();
            w.write_u32::<LE>(e.tile.col as u32).unwrap();
            write_f64s(&mut w, e.features.as_slice());
        }

        w.write_u64::<LE>(self.index.nodes().len() as u64).unwrap();
        w.write_u64::<LE>(self.index.root() as u64).unwrap();
        for node in self.index.nodes() {
            w.write_u8(u8::from(!node.is_leaf())).unwrap();
            write_f64s(&mut w, node.mbr().lo());
            write_f64s(&mut w, node.mbr().hi());
            w.write_u32::<LE>(node.children().len() as u32).unwrap();
            for &c in node.children() {
                w.write_u64::<LE>(c as u64).unwrap();
            }
        }
        w
    }

    pub fn from_bytes(bytes: &[u8]) -> CliResult<Self> {
        let mut r = bytes;
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(read_err)?;
        if &magic != MAGIC {
            return Err(CliError::Data("not an index file (bad magic)".into()));
        }
        let version = r.read_u32::<LE>().map_err(read_err)?;
        if version != FORMAT_VERSION {
            return Err(CliError::Data(format!("unsupported index format version {version}")));
        }
        let metric_id = r.read_u8().map_err(read_err)?;
        let metric = Metric::from_id(metric_id).ok_or_else(|| corrupt(format!("metric id {metric_id}")))?;
        let header = IndexHeader {
            version,
            metric,
            tile_size: r.read_u32::<LE>().map_err(read_err)?,
            raw_dim: r.read_u32::<LE>().map_err(read_err)?,
            reduced_dim: r.read_u32::<LE>().map_err(read_err)?,
            lambda: r.read_f64::<LE>().map_err(read_err)?,
            c: r.read_f64::<LE>().map_err(read_err)?,
            image_count: r.read_u64::<LE>().map_err(read_err)?,
            tile_count: r.read_u64::<LE>().map_err(read_err)?,
            capacity: r.read_u32::<LE>().map_err(read_err)?,
            bins: r.read_u32::<LE>().map_err(read_err)?,
            window: r.read_u32::<LE>().map_err(read_err)?,
            background: r.read_u8().map_err(read_err)?,
        };
        let (raw, dim) = (header.raw_dim as usize, header.reduced_dim as usize);
        let limit = bytes.len() as u64;
        if dim == 0 || dim > raw || header.image_count > limit || header.tile_count > limit {
            return Err(corrupt("header counts are inconsistent"));
        }

        let mean = read_f64s(&mut r, raw)?;
        let components = (0..dim).map(|_| read_f64s(&mut r, raw)).collect::<CliResult<Vec<_>>>()?;
        let eigenvalues = read_f64s(&mut r, dim)?;
        let total = r.read_f64::<LE>().map_err(read_err)?;
        let pca = PcaModel::from_parts(mean, components, eigenvalues, total)?;

        let mut meta = Vec::with_capacity(header.image_count as usize);
        for expected_id in 0..header.image_count as usize {
            let id = r.read_u64::<LE>().map_err(read_err)? as usize;
            if id != expected_id {
                return Err(corrupt(format!("image id {id} out of order")));
            }
            let len = r.read_u32::<LE>().map_err(read_err)? as usize;
            if len > r.len() {
                return Err(corrupt("path length past end of file"));
            }
            let path = String::from_utf8(r[..len].to_vec()).map_err(|_| corrupt("path is not UTF-8"))?;
            r = &r[len..];
            let rows = r.read_u32::<LE>().map_err(read_err)? as usize;
            let cols = r.read_u32::<LE>().map_err(read_err)? as usize;
            if rows * cols > r.len() / 8 {
                return Err(corrupt("grid extents past end of file"));
            }
            let bgs = read_f64s(&mut r, rows * cols)?;
            meta.push((path, rows, cols, bgs));
        }

        let mut slots: Vec<Vec<Option<FeatureVector>>> = meta.iter().map(|m| vec![None; m.1 * m.2]).collect();
        let mut entries = Vec::with_capacity(header.tile_count as usize);
        for _ in 0..header.tile_count {
            let tile = TileRef {
                image_id: r.read_u64::<LE>().map_err(read_err)? as usize,
                row: r.read_u32::<LE>().map_err(read_err)? as usize,
                col: r.read_u32::<LE>().map_err(read_err)? as usize,
            };
            let features = FeatureVector::new(read_f64s(&mut r, dim)?)?;
            let (_, rows, cols, _) = meta
                .get(tile.image_id)
                .ok_or_else(|| corrupt(format!("entry refers to missing image {}", tile.image_id)))?;
            if tile.row >= *rows || tile.col >= *cols {
                return Err(corrupt(format!("entry {tile:?} is off its image grid")));
            }
            let slot = &mut slots[tile.image_id][tile.row * cols + tile.col];
            if slot.replace(features.clone()).is_some() {
                return Err(corrupt(format!("tile {tile:?} is stored twice")));
            }
            entries.push(LeafEntry { features, tile });
        }

        let mut images = Vec::with_capacity(meta.len());
        for (id, ((path, rows, cols, bgs), tiles)) in meta.into_iter().zip(slots).enumerate() {
            let tiles: Option<Vec<FeatureVector>> = tiles.into_iter().collect();
            let tiles = tiles.ok_or_else(|| corrupt(format!("image {id} has unindexed tiles")))?;
            images.push(TiledImage::new(id, rows, cols, tiles, bgs, path)?);
        }
        let catalog = Catalog::new(images)?;

        let node_count = read_len(&mut r, limit, "node")?;
        let root = r.read_u64::<LE>().map_err(read_err)? as usize;
        let mut nodes = Vec::with_capacity(node_count);
        for _ in 0..node_count {
            let internal = r.read_u8().map_err(read_err)? != 0;
            let lo = read_f64s(&mut r, dim)?;
            let hi = read_f64s(&mut r, dim)?;
            let n = r.read_u32::<LE>().map_err(read_err)? as usize;
            if n > r.len() / 8 {
                return Err(corrupt("child list past end of file"));
            }
            let children = (0..n)
                .map(|_| r.read_u64::<LE>().map(|c| c as usize).map_err(read_err))
                .collect::<CliResult<Vec<_>>>()?;
            let kind = if internal {
                NodeKind::Internal(children)
            } else {
                NodeKind::Leaf(children)
            };
            nodes.push(Node::new(Mbr::new(lo, hi)?, kind));
        }
        if !r.is_empty() {
            return Err(corrupt(format!("{} trailing bytes", r.len())));
        }
        let index = SpatialIndex::from_parts(dim, metric, header.capacity as usize, entries, nodes, root)
            .map_err(|e| corrupt(e.to_string()))?;
        Ok(Self {
            header,
            pca,
            catalog,
            index,
        })
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
