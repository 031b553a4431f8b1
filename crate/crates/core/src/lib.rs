//! Top-k search for the best-matching connected subregions of a query image
//! inside a database of tiled images.
//!
//! Images are cut into fixed-size tiles, each tile is described by a feature
//! vector, and every translation (alignment) of the query over a database
//! image yields a matrix of per-tile scores. The score of an alignment is the
//! cumulative score of its best connected subregion, found with a four-corner
//! dynamic program ([`mwcs::dp_max_region`]).
//!
//! Three query strategies are provided in [`search`]:
//!
//! - [`search::linear_search`] evaluates every alignment and is the reference.
//! - [`search::tars`] runs one incremental nearest-neighbour stream per query
//!   tile and stops once a threshold bound falls below the k-th best score.
//! - [`search::spars`] makes a single best-first pass over the spatial index
//!   using bounds from uniform-distance virtual score matrices.
//!
//! The [`features`] module turns grayscale pixels into tile descriptors and
//! reduces them with PCA; [`index`] holds the bulk-loaded R-tree.

pub mod error;
pub mod features;
pub mod index;
pub mod model;
pub mod mwcs;
pub mod scoring;
pub mod search;

pub use error::{Error, Result};
pub use model::{
    is_connected, region_sum, Alignment, Background, Cell, FeatureVector, Metric, Overlap,
    QueryImage, QueryTile, RankedMatch, Region, ScoreMatrix, ScoringParams, TileRef, TiledImage,
};
pub use scoring::BoundMode;
