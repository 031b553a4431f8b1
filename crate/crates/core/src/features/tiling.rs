use crate::error::{invalid, Result};

/// 8-bit grayscale raster, row-major with pixel row 0 at the top (as stored
/// in PGM files).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return invalid("image must be at least 1x1 pixels");
        }
        if pixels.len() != width * height {
            return invalid(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            ));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, level: u8) -> Result<Self> {
        Self::new(width, height, vec![level; width * height])
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Copies out a `w x h` window with top-left pixel `(x, y)`; pixels
    /// outside the image read as `fill`.
    pub fn crop(&self, x: isize, y: isize, w: usize, h: usize, fill: u8) -> Result<GrayImage> {
        let mut out = GrayImage::filled(w, h, fill)?;
        for oy in 0..h {
            for ox in 0..w {
                let (sx, sy) = (x + ox as isize, y + oy as isize);
                if sx >= 0 && sy >= 0 && (sx as usize) < self.width && (sy as usize) < self.height {
                    out.set(ox, oy, self.get(sx as usize, sy as usize));
                }
            }
        }
        Ok(out)
    }
}

/// A square block of pixels, row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTile {
    pub size: usize,
    pixels: Vec<u8>,
}

impl RawTile {
    pub fn new(size: usize, pixels: Vec<u8>) -> Result<Self> {
        if size == 0 || pixels.len() != size * size {
            return invalid(format!(
                "a {size}x{size} tile needs {} pixels, got {}",
                size * size,
                pixels.len()
            ));
        }
        Ok(Self { size, pixels })
    }

    pub fn filled(size: usize, level: u8) -> Self {
        Self {
            size,
            pixels: vec![level; size * size],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.size + x]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Quarter turn counter-clockwise.
    pub fn rotate90(&self) -> RawTile {
        let n = self.size;
        let mut pixels = vec![0; n * n];
        for y in 0..n {
            for x in 0..n {
                // (x, y) moves to (y, n - 1 - x)
                pixels[(n - 1 - x) * n + y] = self.get(x, y);
            }
        }
        RawTile { size: n, pixels }
    }
}

/// Tile grid of an image. Tile row 0 is the bottom strip of the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileGrid {
    pub rows: usize,
    pub cols: usize,
    pub tile_size: usize,
    tiles: Vec<RawTile>,
}

impl TileGrid {
    pub fn tile(&self, row: usize, col: usize) -> &RawTile {
        &self.tiles[row * self.cols + col]
    }

    pub fn tiles(&self) -> &[RawTile] {
        &self.tiles
    }
}

/// Splits an image into non-overlapping `tile_size` squares. The grid is
/// anchored at the bottom-left pixel; partial tiles on the top and right are
/// padded with black.
pub fn tile_image(image: &GrayImage, tile_size: usize) -> Result<TileGrid> {
    if tile_size == 0 {
        return invalid("tile size must be positive");
    }
    let rows = image.height.div_ceil(tile_size);
    let cols = image.width.div_ceil(tile_size);
    let mut tiles = Vec::with_capacity(rows * cols);
    for tr in 0..rows {
        for tc in 0..cols {
            let mut pixels = vec![0u8; tile_size * tile_size];
            for ty in 0..tile_size {
                // Distance of this tile pixel row above the image bottom.
                let up = tr * tile_size + (tile_size - 1 - ty);
                if up >= image.height {
                    continue;
                }
                let y = image.height - 1 - up;
                for tx in 0..tile_size {
                    let x = tc * tile_size + tx;
                    if x < image.width {
                        pixels[ty * tile_size + tx] = image.get(x, y);
                    }
                }
            }
            tiles.push(RawTile {
                size: tile_size,
                pixels,
            });
        }
    }
    Ok(TileGrid {
        rows,
        cols,
        tile_size,
        tiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: usize, h: usize) -> GrayImage {
        let pixels = (0..w * h).map(|i| ((i * 7 + i / w) % 251) as u8 + 1).collect();
        GrayImage::new(w, h, pixels).unwrap()
    }

    #[test]
    fn grid_extents() {
        let g = tile_image(&gradient(96, 64), 32).unwrap();
        assert_eq!((g.rows, g.cols), (2, 3));
        let g = tile_image(&gradient(40, 40), 32).unwrap();
        assert_eq!((g.rows, g.cols), (2, 2));
        let g = tile_image(&gradient(320, 160), 32).unwrap();
        assert_eq!((g.rows, g.cols), (5, 10));
    }

    #[test]
    fn partial_tiles_are_padded_on_top_and_right() {
        let img = gradient(40, 40);
        let g = tile_image(&img, 32).unwrap();
        // Top-right tile holds only an 8x8 corner of real pixels.
        let t = g.tile(1, 1);
        let real = (0..32)
            .flat_map(|y| (0..32).map(move |x| (x, y)))
            .filter(|&(x, y)| t.get(x, y) != 0)
            .count();
        assert_eq!(real, 64);
        // Bottom-left tile is fully covered.
        assert!(g.tile(0, 0).pixels().iter().all(|&p| p != 0));
    }

    #[test]
    fn reassembly_reproduces_source() {
        let img = gradient(70, 45);
        let ts = 16;
        let g = tile_image(&img, ts).unwrap();
        for y in 0..img.height {
            for x in 0..img.width {
                let up = img.height - 1 - y;
                let (tr, ty) = (up / ts, ts - 1 - up % ts);
                let (tc, tx) = (x / ts, x % ts);
                assert_eq!(g.tile(tr, tc).get(tx, ty), img.get(x, y));
            }
        }
    }

    #[test]
    fn empty_image_is_rejected() {
        assert!(GrayImage::new(0, 5, vec![]).is_err());
    }

    #[test]
    fn rotation_is_a_quarter_turn() {
        let t = RawTile::new(2, vec![1, 2, 3, 4]).unwrap();
        let r = t.rotate90();
        assert_eq!(r.pixels(), &[2, 4, 1, 3]);
        assert_eq!(r.rotate90().rotate90().rotate90(), t);
    }
}
