use crate::imaging::ImageBuffer;

use super::MetricsError;

pub const TILE_ROWS: usize = 3;
pub const TILE_COLS: usize = 4;
pub const TILE_COUNT: usize = TILE_ROWS * TILE_COLS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileRect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

/// A 3-row × 4-column partition of a frame. Each tile is
/// `width / 4` × `height / 3`; the last column and row absorb the remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileGrid {
    rects: Vec<TileRect>,
}

impl TileGrid {
    pub fn for_size(width: usize, height: usize) -> Result<Self, MetricsError> {
        if width < TILE_COLS || height < TILE_ROWS {
            return Err(MetricsError::TooSmallForTiles { width, height });
        }
        let (tw, th) = (width / TILE_COLS, height / TILE_ROWS);
        let mut rects = Vec::with_capacity(TILE_COUNT);
        for r in 0..TILE_ROWS {
            for c in 0..TILE_COLS {
                let x = c * tw;
                let y = r * th;
                let w = if c == TILE_COLS - 1 { width - x } else { tw };
                let h = if r == TILE_ROWS - 1 { height - y } else { th };
                rects.push(TileRect { x, y, width: w, height: h });
            }
        }
        Ok(Self { rects })
    }

    pub fn rects(&self) -> &[TileRect] {
        &self.rects
    }
}

/// Splits a frame into its 12 tiles, row-major.
pub fn split_tiles(img: &ImageBuffer) -> Result<Vec<ImageBuffer>, MetricsError> {
    let grid = TileGrid::for_size(img.width(), img.height())?;
    Ok(grid
        .rects()
        .iter()
        .map(|r| img.crop(r.x, r.y, r.width, r.height).expect("tile inside frame"))
        .collect())
}

/// Inverse of [`split_tiles`].
pub fn assemble_tiles(tiles: &[ImageBuffer], width: usize, height: usize) -> Result<ImageBuffer, MetricsError> {
    let grid = TileGrid::for_size(width, height)?;
    if tiles.len() != TILE_COUNT {
        return Err(MetricsError::TileCount(tiles.len()));
    }
    let mut out = ImageBuffer::filled(width, height, [0, 0, 0])?;
    for (rect, tile) in grid.rects().iter().zip(tiles) {
        if tile.width() != rect.width || tile.height() != rect.height {
            return Err(MetricsError::TileShape);
        }
        out.blit(tile, rect.x, rect.y)?;
    }
    Ok(out.with_tag(tiles[0].tag().cloned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_division() {
        let img = ImageBuffer::filled(400, 300, [1, 2, 3]).unwrap();
        let tiles = split_tiles(&img).unwrap();
        assert_eq!(tiles.len(), 12);
        assert!(tiles.iter().all(|t| t.width() == 100 && t.height() == 100));
    }

    #[test]
    fn remainder_goes_to_last_row_and_column() {
        let img = ImageBuffer::filled(401, 301, [1, 2, 3]).unwrap();
        let tiles = split_tiles(&img).unwrap();
        for (i, t) in tiles.iter().enumerate() {
            let (r, c) = (i / 4, i % 4);
            assert_eq!(t.width(), if c == 3 { 101 } else { 100 });
            assert_eq!(t.height(), if r == 2 { 101 } else { 100 });
        }
    }

    #[test]
    fn too_small() {
        let img = ImageBuffer::filled(3, 10, [0, 0, 0]).unwrap();
        assert!(matches!(split_tiles(&img), Err(MetricsError::TooSmallForTiles { .. })));
    }

    #[test]
    fn reassembly_is_bit_exact() {
        let img = ImageBuffer::from_fn(37, 22, |x, y| [(x * 7) as u8, (y * 11) as u8, (x * y) as u8]).unwrap();
        let tiles = split_tiles(&img).unwrap();
        assert_eq!(assemble_tiles(&tiles, 37, 22).unwrap(), img);
    }
}
