//! Ingestion pipeline: tiling, tile descriptors and PCA reduction.

mod descriptor;
mod pca;
mod tiling;

pub use descriptor::{csd_descriptor, DescriptorConfig, PresenceHistogram, TileDescriptor};
pub use pca::{energy_retained, pca_fit, pca_project, pca_reconstruct, PcaModel};
pub use tiling::{tile_image, GrayImage, RawTile, TileGrid};
