//! Full-reference SSIM and the feature measurements shared by calibration,
//! the virtual camera and the tuner state.

mod features;
mod ssim;
mod tiles;

pub use features::{extract_features, FeatureTuple};
pub use ssim::{ssim, ssim_planes, ssim_rgb, SIGMA as SSIM_SIGMA, WINDOW as SSIM_WINDOW};
pub use tiles::{assemble_tiles, split_tiles, TileGrid, TileRect, TILE_COLS, TILE_COUNT, TILE_ROWS};

use thiserror::Error;

use crate::imaging::ImagingError;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("image sizes differ: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("image {width}x{height} is smaller than the 11x11 SSIM window")]
    SmallerThanWindow { width: usize, height: usize },
    #[error("frame {width}x{height} too small to split into 4x3 tiles")]
    TooSmallForTiles { width: usize, height: usize },
    #[error("expected 12 tiles, got {0}")]
    TileCount(usize),
    #[error("tile size does not match the grid")]
    TileShape,
    #[error(transparent)]
    Imaging(#[from] ImagingError),
}
