use crate::error::{invalid, Error, Result};
use crate::model::{TileRef, TiledImage};

/// The database images; image ids are their positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalog {
    images: Vec<TiledImage>,
}

impl Catalog {
    pub fn new(images: Vec<TiledImage>) -> Result<Self> {
        if let Some((pos, img)) = images.iter().enumerate().find(|(i, img)| img.id != *i) {
            return invalid(format!("image at position {pos} has id {}", img.id));
        }
        if let Some(first) = images.first() {
            if let Some(bad) = images.iter().find(|i| i.dim() != first.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: bad.dim(),
                });
            }
        }
        Ok(Self { images })
    }

    pub fn images(&self) -> &[TiledImage] {
        &self.images
    }

    pub fn image(&self, id: usize) -> Option<&TiledImage> {
        self.images.get(id)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn tile_count(&self) -> usize {
        self.images.iter().map(|i| i.rows * i.cols).sum()
    }

    /// Owning image and grid position of `tile`.
    pub fn lookup(&self, tile: TileRef) -> Result<(&TiledImage, usize, usize)> {
        match self.images.get(tile.image_id) {
            Some(img) if tile.row < img.rows && tile.col < img.cols => Ok((img, tile.row, tile.col)),
            Some(img) => Err(Error::Integrity(format!(
                "tile ({}, {}) is outside the {}x{} grid of image {}",
                tile.row, tile.col, img.rows, img.cols, img.id
            ))),
            None => Err(Error::Integrity(format!("no image with id {}", tile.image_id))),
        }
    }
}

/// Free-function form of [`Catalog::lookup`].
pub fn image_grid_lookup(tile: TileRef, catalog: &Catalog) -> Result<(&TiledImage, usize, usize)> {
    catalog.lookup(tile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FeatureVector;

    fn image(id: usize, rows: usize, cols: usize) -> TiledImage {
        let tiles = (0..rows * cols)
            .map(|k| FeatureVector::new(vec![id as f64, k as f64]).unwrap())
            .collect();
        TiledImage::new(id, rows, cols, tiles, vec![0.0; rows * cols], format!("{id}.pgm")).unwrap()
    }

    #[test]
    fn round_trip_over_a_grid() {
        let cat = Catalog::new(vec![image(0, 2, 2), image(1, 5, 10)]).unwrap();
        let mut seen = std::collections::HashSet::new();
        for t in cat.image(1).unwrap().tile_refs() {
            let (img, r, c) = cat.lookup(t).unwrap();
            assert_eq!((img.id, r, c), (1, t.row, t.col));
            seen.insert((r, c));
        }
        assert_eq!(seen.len(), 50);
    }

    #[test]
    fn dangling_references() {
        let cat = Catalog::new(vec![image(0, 2, 2)]).unwrap();
        let off = TileRef {
            image_id: 0,
            row: 2,
            col: 0,
        };
        assert!(matches!(cat.lookup(off), Err(Error::Integrity(_))));
        let missing = TileRef {
            image_id: 3,
            row: 0,
            col: 0,
        };
        assert!(matches!(image_grid_lookup(missing, &cat), Err(Error::Integrity(_))));
    }

    #[test]
    fn ids_must_match_positions() {
        assert!(Catalog::new(vec![image(1, 1, 1)]).is_err());
    }
}
