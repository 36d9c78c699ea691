use std::collections::BTreeMap;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CalibrationError, CameraDevice};
use crate::imaging::{apply_knob, CameraParams, ImageBuffer, Knob};
use crate::metrics::ssim_rgb;
use crate::vcam::linear_grid;

pub const CALIBRATION_STEP: f64 = 0.05;
const TIE_EPS: f64 = 1e-12;
const FLAT_SPREAD: f64 = 1e-9;

/// Camera range of `knob` in steps of 0.05.
pub fn default_knob_grid(knob: Knob) -> Vec<f64> {
    let r = knob.camera_range();
    linear_grid(r.lo, r.hi, CALIBRATION_STEP)
}

/// 0, 10, ..., 100.
pub fn default_camera_values() -> Vec<u8> {
    (0..=CameraParams::MAX).step_by(10).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationPoint {
    pub camera_value: u8,
    pub factor: f64,
    pub ssim: f64,
    /// Every grid factor scored (almost) the same SSIM, so the match says
    /// nothing about the parameter.
    pub low_confidence: bool,
}

/// For each camera value of `knob`, the virtual factor whose rendering of
/// the default capture best matches the real capture under per-channel
/// RGB SSIM.
///
/// The default image is captured once with `knob` at 50; other parameters
/// are left untouched. `knob` is restored to 50 afterwards.
pub fn calibrate(
    cam: &mut dyn CameraDevice,
    knob: Knob,
    camera_values: &[u8],
    knob_grid: &[f64],
) -> Result<Vec<CalibrationPoint>, CalibrationError> {
    if knob_grid.is_empty() || knob_grid.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(CalibrationError::Grid);
    }
    if let Some(&v) = camera_values.iter().find(|&&v| v > CameraParams::MAX) {
        return Err(CalibrationError::CameraValue(v as u32));
    }
    cam.set_param(knob, CameraParams::DEFAULT_VALUE)?;
    let default = cam.capture()?;
    let candidates: Vec<ImageBuffer> = knob_grid
        .par_iter()
        .map(|&f| apply_knob(&default, knob, f))
        .collect::<Result<_, _>>()?;

    let mut values: Vec<u8> = camera_values.to_vec();
    values.sort_unstable();
    values.dedup();
    let mut points = Vec::with_capacity(values.len());
    for &p in &values {
        cam.set_param(knob, p)?;
        let captured = cam.capture()?;
        let scores: Vec<f64> = candidates
            .par_iter()
            .map(|c| ssim_rgb(&captured, c))
            .collect::<Result<_, _>>()?;
        let mut best = 0;
        for i in 1..scores.len() {
            let closer = (knob_grid[i] - 1.0).abs() < (knob_grid[best] - 1.0).abs();
            if scores[i] > scores[best] + TIE_EPS || (scores[i] >= scores[best] - TIE_EPS && closer) {
                best = i;
            }
        }
        let (lo, hi) = scores
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        let low_confidence = hi - lo < FLAT_SPREAD;
        if low_confidence {
            warn!("{knob} at {p}: SSIM flat across the grid, scene too uniform to calibrate");
        }
        points.push(CalibrationPoint {
            camera_value: p,
            factor: knob_grid[best],
            ssim: scores[best],
            low_confidence,
        });
    }
    cam.set_param(knob, CameraParams::DEFAULT_VALUE)?;
    Ok(points)
}

/// Calibration results for any subset of the four parameters. Serialized as
/// `{param: [[camera_value, factor, best_ssim], ...]}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KnobMap {
    entries: BTreeMap<Knob, Vec<CalibrationPoint>>,
}

#[derive(Serialize, Deserialize)]
struct KnobMapJson(BTreeMap<String, Vec<(u8, f64, f64)>>);

impl KnobMap {
    pub fn insert(&mut self, knob: Knob, mut points: Vec<CalibrationPoint>) {
        points.sort_by_key(|p| p.camera_value);
        self.entries.insert(knob, points);
    }

    pub fn get(&self, knob: Knob) -> Option<&[CalibrationPoint]> {
        self.entries.get(&knob).map(Vec::as_slice)
    }

    pub fn knobs(&self) -> impl Iterator<Item = Knob> + '_ {
        self.entries.keys().copied()
    }

    /// Factor at `value`, interpolating linearly between calibrated points
    /// and holding the end values outside them.
    pub fn factor_at(&self, knob: Knob, value: u8) -> Option<f64> {
        let pts = self.get(knob)?;
        let first = pts.first()?;
        if value <= first.camera_value {
            return Some(first.factor);
        }
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if value <= b.camera_value {
                let t = (value - a.camera_value) as f64 / (b.camera_value - a.camera_value) as f64;
                return Some(a.factor + t * (b.factor - a.factor));
            }
        }
        pts.last().map(|p| p.factor)
    }

    /// Calibrated camera value whose factor is nearest `factor`.
    pub fn camera_value_for(&self, knob: Knob, factor: f64) -> Option<u8> {
        self.get(knob)?
            .iter()
            .min_by(|a, b| (a.factor - factor).abs().total_cmp(&(b.factor - factor).abs()))
            .map(|p| p.camera_value)
    }

    pub fn to_json(&self) -> Result<String, CalibrationError> {
        let doc = KnobMapJson(
            self.entries
                .iter()
                .map(|(k, pts)| {
                    let rows = pts.iter().map(|p| (p.camera_value, p.factor, p.ssim)).collect();
                    (k.name().to_string(), rows)
                })
                .collect(),
        );
        serde_json::to_string_pretty(&doc).map_err(|e| CalibrationError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, CalibrationError> {
        let doc: KnobMapJson = serde_json::from_str(text).map_err(|e| CalibrationError::Format(e.to_string()))?;
        let mut map = Self::default();
        for (name, rows) in doc.0 {
            let knob: Knob = name.parse()?;
            let mut pts: Vec<CalibrationPoint> = Vec::with_capacity(rows.len());
            for (camera_value, factor, ssim) in rows {
                if camera_value > CameraParams::MAX {
                    return Err(CalibrationError::CameraValue(camera_value as u32));
                }
                pts.push(CalibrationPoint {
                    camera_value,
                    factor,
                    ssim,
                    low_confidence: false,
                });
            }
            pts.sort_by_key(|p| p.camera_value);
            if pts.windows(2).any(|w| w[0].camera_value == w[1].camera_value) {
                return Err(CalibrationError::Format(format!("duplicate camera value for {name}")));
            }
            map.entries.insert(knob, pts);
        }
        Ok(map)
    }
}
