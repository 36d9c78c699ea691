use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::CalibrationError;
use crate::imaging::{apply_config, CameraParams, ImageBuffer, Knob, KnobConfig};

/// A camera exposing the four parameters on a 0..=100 scale.
pub trait CameraDevice {
    fn set_param(&mut self, knob: Knob, value: u8) -> Result<(), CalibrationError>;
    fn get_param(&mut self, knob: Knob) -> Result<u8, CalibrationError>;
    fn capture(&mut self) -> Result<ImageBuffer, CalibrationError>;
}

/// Monotone map from a camera value to the blend factor the synthetic
/// camera applies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HiddenMap {
    /// `intercept + slope·p`
    Affine { intercept: f64, slope: f64 },
    /// `exp(beta·(p − 50))`
    Convex { beta: f64 },
    /// `2 − exp(−beta·(p − 50))`
    Concave { beta: f64 },
}

const FIT_MARGIN: f64 = 0.98;

impl HiddenMap {
    pub fn eval(&self, p: u8) -> f64 {
        let p = p as f64;
        match *self {
            Self::Affine { intercept, slope } => intercept + slope * p,
            Self::Convex { beta } => (beta * (p - 50.0)).exp(),
            Self::Concave { beta } => 2.0 - (-beta * (p - 50.0)).exp(),
        }
    }

    /// Linear map through (50, 1) spanning as much of the knob's camera
    /// range as symmetry allows.
    pub fn linear_for(knob: Knob) -> Self {
        let r = knob.camera_range();
        let slope = (1.0 - r.lo).min(r.hi - 1.0) / 50.0 * FIT_MARGIN;
        Self::Affine {
            intercept: 1.0 - 50.0 * slope,
            slope,
        }
    }

    pub fn convex_for(knob: Knob) -> Self {
        let r = knob.camera_range();
        let beta = (-r.lo.ln()).min(r.hi.ln()) / 50.0 * FIT_MARGIN;
        Self::Convex { beta }
    }

    pub fn concave_for(knob: Knob) -> Self {
        let r = knob.camera_range();
        let top = if r.hi < 2.0 { -(2.0 - r.hi).ln() } else { f64::INFINITY };
        let beta = (2.0 - r.lo).ln().min(top) / 50.0 * FIT_MARGIN;
        Self::Concave { beta }
    }
}

/// Test double: renders a fixed scene through [`apply_config`] with the
/// factors given by each parameter's hidden map.
#[derive(Clone, Debug)]
pub struct SyntheticCamera {
    base: ImageBuffer,
    maps: [HiddenMap; 4],
    params: CameraParams,
    latency: Duration,
}

impl SyntheticCamera {
    pub fn new(base: ImageBuffer, maps: [HiddenMap; 4]) -> Self {
        Self {
            base,
            maps,
            params: CameraParams::default(),
            latency: Duration::ZERO,
        }
    }

    /// The same map shape on every parameter.
    pub fn uniform(base: ImageBuffer, make: impl Fn(Knob) -> HiddenMap) -> Self {
        Self::new(base, Knob::ALL.map(make))
    }

    /// Sleep applied on every parameter change.
    pub fn with_latency(mut self, latency: Duration) -> Self {
        self.latency = latency;
        self
    }

    pub fn hidden_factor(&self, knob: Knob, value: u8) -> f64 {
        self.maps[knob.index()].eval(value)
    }

    pub fn params(&self) -> CameraParams {
        self.params
    }

    pub fn current_config(&self) -> KnobConfig {
        KnobConfig::from_array(Knob::ALL.map(|k| self.hidden_factor(k, self.params.get(k))))
    }
}

impl CameraDevice for SyntheticCamera {
    fn set_param(&mut self, knob: Knob, value: u8) -> Result<(), CalibrationError> {
        self.params.set(knob, value)?;
        if !self.latency.is_zero() {
            thread::sleep(self.latency);
        }
        Ok(())
    }

    fn get_param(&mut self, knob: Knob) -> Result<u8, CalibrationError> {
        Ok(self.params.get(knob))
    }

    fn capture(&mut self) -> Result<ImageBuffer, CalibrationError> {
        Ok(apply_config(&self.base, &self.current_config())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::apply_knob;

    fn scene() -> ImageBuffer {
        ImageBuffer::from_fn(24, 16, |x, y| [(x * 9) as u8, (y * 13) as u8, 90]).unwrap()
    }

    #[test]
    fn maps_pass_through_unity_and_stay_in_range() {
        for k in Knob::ALL {
            let r = k.camera_range();
            for m in [HiddenMap::linear_for(k), HiddenMap::convex_for(k), HiddenMap::concave_for(k)] {
                assert!((m.eval(50) - 1.0).abs() < 1e-12, "{k} {m:?}");
                assert!(m.eval(0) >= r.lo && m.eval(100) <= r.hi, "{k} {m:?}");
                assert!((0..100).all(|p| m.eval(p) < m.eval(p + 1)));
            }
        }
    }

    #[test]
    fn default_capture_is_base() {
        let mut cam = SyntheticCamera::uniform(scene(), HiddenMap::linear_for);
        assert_eq!(cam.capture().unwrap(), scene());
    }

    #[test]
    fn capture_follows_setting() {
        let maps = Knob::ALL.map(|_| HiddenMap::Affine {
            intercept: 0.6,
            slope: 0.01,
        });
        let mut cam = SyntheticCamera::new(scene(), maps);
        cam.set_param(Knob::Contrast, 40).unwrap();
        cam.set_param(Knob::ColorSaturation, 40).unwrap();
        cam.set_param(Knob::Sharpness, 40).unwrap();
        cam.set_param(Knob::Brightness, 100).unwrap();
        assert_eq!(cam.capture().unwrap(), apply_knob(&scene(), Knob::Brightness, 1.6).unwrap());
        assert!(cam.set_param(Knob::Brightness, 101).is_err());
    }
}
