use serde::Serialize;

use super::delta::{feature_delta, median, DeltaTable};
use super::table::{tile_features, VcTable};
use super::time::TimeOfDay;
use super::VcamError;
use crate::imaging::{apply_config, ImageBuffer, KnobConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TileMatch {
    pub config: KnobConfig,
    /// L1 distance between the wanted delta and the matched table entry.
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct VcRender {
    pub image: ImageBuffer,
    pub config: KnobConfig,
    pub tiles: Vec<TileMatch>,
}

/// Chooses the config that moves `frame` (captured at `t1`) toward the
/// profile of `t2`: each tile picks its nearest table delta, the tile
/// configs are reduced by a component-wise median, and the whole frame is
/// rendered once with the result.
pub fn choose_config(
    frame: &ImageBuffer,
    t1: TimeOfDay,
    t2: TimeOfDay,
    vc: &VcTable,
    dt: &DeltaTable,
) -> Result<(KnobConfig, Vec<TileMatch>), VcamError> {
    vc.slot(t1.interval())?;
    let target = vc.slot(t2.interval())?;
    let current = tile_features(frame)?;
    let tiles: Vec<TileMatch> = current
        .iter()
        .zip(&target.tiles)
        .enumerate()
        .map(|(t, (cur, want))| {
            let (config, distance) = dt.nearest(t, &feature_delta(want, cur));
            TileMatch { config, distance }
        })
        .collect();
    let config = KnobConfig::from_array(std::array::from_fn(|i| {
        let mut col: Vec<f64> = tiles.iter().map(|m| m.config.to_array()[i]).collect();
        median(&mut col)
    }));
    Ok((config, tiles))
}

pub fn render_to_time(
    frame: &ImageBuffer,
    t1: TimeOfDay,
    t2: TimeOfDay,
    vc: &VcTable,
    dt: &DeltaTable,
) -> Result<VcRender, VcamError> {
    let (config, tiles) = choose_config(frame, t1, t2, vc, dt)?;
    Ok(VcRender {
        image: apply_config(frame, &config)?,
        config,
        tiles,
    })
}
