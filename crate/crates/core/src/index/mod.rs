//! Bulk-loaded R-tree over tile feature vectors.
//!
//! Leaf entries point back to their image grid position through
//! [`TileRef`](crate::model::TileRef), so a nearest-neighbour hit can be
//! turned into an alignment by [`Catalog::lookup`].

mod catalog;
mod cursor;
mod mbr;
mod tree;

pub use catalog::{image_grid_lookup, Catalog};
pub use cursor::NnCursor;
pub use mbr::{mindist, Mbr};
pub use tree::{str_bulk_load, LeafEntry, Node, NodeKind, SpatialIndex, DEFAULT_CAPACITY};
