use super::tiling::RawTile;
use crate::error::{invalid, Result};
use crate::model::FeatureVector;

/// Settings of the presence-histogram tile descriptor.
///
/// The tile is scanned with a `window x window` structuring element at a
/// stride of `window`. Each position marks the quantized intensity levels it
/// contains; component `b` counts the positions in which level `b` occurs.
/// Components `bins..output_dim` stay zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DescriptorConfig {
    pub tile_size: usize,
    pub bins: usize,
    pub window: usize,
    pub output_dim: usize,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        Self {
            tile_size: 32,
            bins: 64,
            window: 8,
            output_dim: 256,
        }
    }
}

impl DescriptorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tile_size == 0 || self.window == 0 || self.bins == 0 {
            return invalid("tile size, window and bins must be positive");
        }
        if !self.tile_size.is_multiple_of(self.window) {
            return invalid(format!(
                "tile size {} is not a multiple of window {}",
                self.tile_size, self.window
            ));
        }
        if self.bins > self.output_dim || self.bins > 256 {
            return invalid("bins must not exceed the output dimension or 256 levels");
        }
        Ok(())
    }

    /// Number of window positions per tile.
    pub fn positions(&self) -> usize {
        let per_side = self.tile_size / self.window;
        per_side * per_side
    }
}

/// Turns a raw tile into a feature vector.
pub trait TileDescriptor {
    fn dim(&self) -> usize;
    fn describe(&self, tile: &RawTile) -> Result<FeatureVector>;
}

/// The reference descriptor; see [`DescriptorConfig`].
#[derive(Debug, Clone, Copy, Default)]
pub struct PresenceHistogram(pub DescriptorConfig);

impl TileDescriptor for PresenceHistogram {
    fn dim(&self) -> usize {
        self.0.output_dim
    }

    fn describe(&self, tile: &RawTile) -> Result<FeatureVector> {
        csd_descriptor(tile, &self.0)
    }
}

pub fn csd_descriptor(tile: &RawTile, cfg: &DescriptorConfig) -> Result<FeatureVector> {
    cfg.validate()?;
    if tile.size != cfg.tile_size {
        return invalid(format!(
            "tile is {0}x{0}, descriptor expects {1}x{1}",
            tile.size, cfg.tile_size
        ));
    }
    let mut counts = vec![0.0; cfg.output_dim];
    let mut present = vec![false; cfg.bins];
    let per_side = cfg.tile_size / cfg.window;
    for wy in 0..per_side {
        for wx in 0..per_side {
            present.fill(false);
            for y in wy * cfg.window..(wy + 1) * cfg.window {
                for x in wx * cfg.window..(wx + 1) * cfg.window {
                    present[tile.get(x, y) as usize * cfg.bins / 256] = true;
                }
            }
            for (bin, _) in present.iter().enumerate().filter(|(_, &p)| p) {
                counts[bin] += 1.0;
            }
        }
    }
    FeatureVector::new(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DescriptorConfig {
        DescriptorConfig::default()
    }

    #[test]
    fn uniform_tile_has_single_component() {
        let d = csd_descriptor(&RawTile::filled(32, 200), &cfg()).unwrap();
        let nonzero: Vec<_> = d.as_slice().iter().enumerate().filter(|(_, &v)| v != 0.0).collect();
        assert_eq!(nonzero, vec![(200 * 64 / 256, &16.0)]);
        assert_eq!(d.dim(), 256);
    }

    #[test]
    fn black_tile_lands_in_bin_zero() {
        let d = csd_descriptor(&RawTile::filled(32, 0), &cfg()).unwrap();
        assert_eq!(d.as_slice()[0], 16.0);
        assert_eq!(d.as_slice().iter().sum::<f64>(), 16.0);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        assert!(csd_descriptor(&RawTile::filled(16, 0), &cfg()).is_err());
        let bad = DescriptorConfig {
            window: 5,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rotated_block_pattern_keeps_descriptor() {
        // Each 8x8 window gets its own pair of levels in a diagonal split.
        let mut pixels = vec![0u8; 32 * 32];
        for y in 0..32 {
            for x in 0..32 {
                let w = (y / 8) * 4 + x / 8;
                let level = if (x % 8) > (y % 8) { w * 13 } else { 255 - w * 11 };
                pixels[y * 32 + x] = level as u8;
            }
        }
        let tile = RawTile::new(32, pixels).unwrap();
        let a = csd_descriptor(&tile, &cfg()).unwrap();
        let b = csd_descriptor(&tile.rotate90(), &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_tiles_give_identical_vectors() {
        let pixels: Vec<u8> = (0..1024).map(|i| (i * 37 % 256) as u8).collect();
        let a = RawTile::new(32, pixels.clone()).unwrap();
        let b = RawTile::new(32, pixels).unwrap();
        assert_eq!(csd_descriptor(&a, &cfg()).unwrap(), csd_descriptor(&b, &cfg()).unwrap());
    }

    #[test]
    fn components_are_bounded_counts() {
        let pixels: Vec<u8> = (0..1024).map(|i| (i * 91 % 256) as u8).collect();
        let d = csd_descriptor(&RawTile::new(32, pixels).unwrap(), &cfg()).unwrap();
        let positions = cfg().positions() as f64;
        for &v in d.as_slice() {
            assert!(v >= 0.0 && v <= positions && v.fract() == 0.0);
        }
        // Every window marks between 1 and window^2 levels.
        let total: f64 = d.as_slice().iter().sum();
        assert!(total >= positions && total <= positions * 64.0);
    }
}
