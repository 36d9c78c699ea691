use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::FrameCorpus;
use super::table::tile_features;
use super::{VcamError, SCHEMA_VERSION};
use crate::imaging::{apply_config, Knob, KnobConfig};
use crate::metrics::{FeatureTuple, TILE_COUNT};

pub const DEFAULT_DELTA_STEP: f64 = 0.25;
pub const RATIO_EPS: f64 = 1e-3;

/// Factor grids for the four knobs, in knob order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnobGrids {
    pub brightness: Vec<f64>,
    pub contrast: Vec<f64>,
    pub color_saturation: Vec<f64>,
    pub sharpness: Vec<f64>,
}

fn anchored_grid(knob: Knob, step: f64) -> Vec<f64> {
    let r = knob.camera_range();
    let mut v = vec![1.0];
    let mut x = 1.0 - step;
    while x >= r.lo - 1e-9 {
        v.push(x);
        x -= step;
    }
    let mut x = 1.0 + step;
    while x <= r.hi + 1e-9 {
        v.push(x);
        x += step;
    }
    v.sort_by(f64::total_cmp);
    if v[0] - r.lo > step / 2.0 {
        v.insert(0, r.lo);
    }
    if r.hi - v[v.len() - 1] > step / 2.0 {
        v.push(r.hi);
    }
    v.iter().map(|x| (x * 1e9).round() / 1e9).collect()
}

/// Evenly spaced factors from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect()
}

impl KnobGrids {
    /// Grids over the camera ranges that contain 1.0 exactly and step by
    /// `step` away from it; a range end more than half a step beyond the
    /// last point is added as well.
    pub fn anchored(step: f64) -> Self {
        Self::from_fn(|k| anchored_grid(k, step))
    }

    pub fn from_fn(mut f: impl FnMut(Knob) -> Vec<f64>) -> Self {
        Self {
            brightness: f(Knob::Brightness),
            contrast: f(Knob::Contrast),
            color_saturation: f(Knob::ColorSaturation),
            sharpness: f(Knob::Sharpness),
        }
    }

    pub fn get(&self, knob: Knob) -> &[f64] {
        match knob {
            Knob::Brightness => &self.brightness,
            Knob::Contrast => &self.contrast,
            Knob::ColorSaturation => &self.color_saturation,
            Knob::Sharpness => &self.sharpness,
        }
    }

    pub fn len(&self) -> usize {
        Knob::ALL.iter().map(|&k| self.get(k).len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cartesian product in lexicographic order.
    pub fn configs(&self) -> Vec<KnobConfig> {
        let mut out = Vec::with_capacity(self.len());
        for &b in &self.brightness {
            for &c in &self.contrast {
                for &s in &self.color_saturation {
                    for &sh in &self.sharpness {
                        out.push(KnobConfig::new(b, c, s, sh));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), VcamError> {
        for k in Knob::ALL {
            let g = self.get(k);
            if g.is_empty() || g.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(VcamError::Format(format!("{k} grid must be non-empty and non-negative")));
            }
        }
        Ok(())
    }
}

impl Default for KnobGrids {
    fn default() -> Self {
        Self::anchored(DEFAULT_DELTA_STEP)
    }
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-tile feature-ratio deltas for every config of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaTable {
    pub schema_version: u32,
    pub grids: KnobGrids,
    pub configs: Vec<KnobConfig>,
    /// `tiles[t][c]` is the median delta of config `c` on tile `t`.
    pub tiles: Vec<Vec<[f64; 4]>>,
    pub sampled_frames: Vec<String>,
}

impl DeltaTable {
    /// Samples one frame per interval with `seed`, renders it under every
    /// config and records the per-tile median of rendered/original feature
    /// ratios.
    pub fn build(corpus: &FrameCorpus, grids: &KnobGrids, seed: u64) -> Result<Self, VcamError> {
        grids.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampled = Vec::new();
        for idxs in corpus.intervals().values() {
            let pick = idxs[rng.random_range(0..idxs.len())];
            sampled.push(&corpus.frames()[pick]);
        }
        if sampled.is_empty() {
            return Err(VcamError::EmptyCorpus);
        }
        let frames = sampled
            .iter()
            .map(|f| {
                let img = corpus.load(f)?;
                let base = tile_features(&img)?;
                Ok((img, base))
            })
            .collect::<Result<Vec<_>, VcamError>>()?;

        let configs = grids.configs();
        let per_config: Vec<Vec<[f64; 4]>> = configs
            .par_iter()
            .map(|cfg| {
                let mut ratios: Vec<Vec<[f64; 4]>> = (0..TILE_COUNT).map(|_| Vec::with_capacity(frames.len())).collect();
                for (img, base) in &frames {
                    let rendered = if cfg.is_identity() {
                        base.clone()
                    } else {
                        tile_features(&apply_config(img, cfg)?)?
                    };
                    for (t, (r, b)) in rendered.iter().zip(base).enumerate() {
                        ratios[t].push(r.ratio_to(b, RATIO_EPS));
                    }
                }
                Ok(ratios
                    .iter()
                    .map(|rs| {
                        std::array::from_fn(|i| {
                            let mut col: Vec<f64> = rs.iter().map(|r| r[i]).collect();
                            median(&mut col)
                        })
                    })
                    .collect())
            })
            .collect::<Result<_, VcamError>>()?;

        let tiles = (0..TILE_COUNT)
            .map(|t| per_config.iter().map(|c| c[t]).collect())
            .collect();
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            grids: grids.clone(),
            configs,
            tiles,
            sampled_frames: sampled.iter().map(|f| f.frame_id.clone()).collect(),
        })
    }

    /// Config whose delta on `tile` is nearest to `target` in L1, with its
    /// distance. Ties go to the lexicographically smallest config.
    pub fn nearest(&self, tile: usize, target: &[f64; 4]) -> (KnobConfig, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (c, d) in self.tiles[tile].iter().enumerate() {
            let dist: f64 = (0..4).map(|i| (d[i] - target[i]).abs()).sum();
            let better = dist < best.1
                || (dist == best.1 && self.configs[c].lex_cmp(&self.configs[best.0]).is_lt());
            if better {
                best = (c, dist);
            }
        }
        (self.configs[best.0], best.1)
    }

    pub fn identity_index(&self) -> Option<usize> {
        self.configs.iter().position(KnobConfig::is_identity)
    }

    pub fn validate(&self) -> Result<(), VcamError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(VcamError::Format(format!(
                "schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.grids.validate()?;
        if self.configs.is_empty() || self.tiles.len() != TILE_COUNT {
            return Err(VcamError::Format("delta table needs configs and 12 tiles".into()));
        }
        for t in &self.tiles {
            if t.len() != self.configs.len() || t.iter().flatten().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(VcamError::Format("delta entries must be finite and positive".into()));
            }
        }
        Ok(())
    }
}

pub(crate) fn feature_delta(target: &FeatureTuple, current: &FeatureTuple) -> [f64; 4] {
    target.ratio_to(current, RATIO_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchored_grids() {
        let g = KnobGrids::anchored(0.25);
        assert_eq!(g.brightness, vec![0.6, 0.75, 1.0, 1.25, 1.5]);
        assert_eq!(g.contrast.len(), 13);
        assert_eq!(g.contrast[0], 0.6);
        assert_eq!(*g.contrast.last().unwrap(), 3.5);
        assert_eq!(g.color_saturation, vec![0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(g.sharpness, vec![0.5, 0.75, 1.0, 1.25, 1.5]);
        assert_eq!(g.len(), 5 * 13 * 9 * 5);
        assert_eq!(g.configs().len(), g.len());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn linear() {
        assert_eq!(linear_grid(0.6, 1.6, 0.25), vec![0.6, 0.85, 1.1, 1.35, 1.6]);
        assert_eq!(linear_grid(0.6, 1.6, 0.05).len(), 21);
    }
}
