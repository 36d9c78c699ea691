use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ImagingError;

/// One of the four tunable image properties.
///
/// The declaration order is also the order in which a full [`KnobConfig`]
/// is applied to an image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    Brightness,
    Contrast,
    ColorSaturation,
    Sharpness,
}

/// Inclusive factor range a knob covers when it stands in for a camera
/// parameter swept over its full 0..=100 range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnobRange {
    pub lo: f64,
    pub hi: f64,
}

impl KnobRange {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo - 1e-9 && v <= self.hi + 1e-9
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

impl Knob {
    pub const ALL: [Knob; 4] = [
        Knob::Brightness,
        Knob::Contrast,
        Knob::ColorSaturation,
        Knob::Sharpness,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Knob::Brightness => "brightness",
            Knob::Contrast => "contrast",
            Knob::ColorSaturation => "color_saturation",
            Knob::Sharpness => "sharpness",
        }
    }

    pub fn camera_range(self) -> KnobRange {
        match self {
            Knob::Brightness => KnobRange { lo: 0.6, hi: 1.6 },
            Knob::Contrast => KnobRange { lo: 0.6, hi: 3.6 },
            Knob::ColorSaturation => KnobRange { lo: 0.1, hi: 2.0 },
            Knob::Sharpness => KnobRange { lo: 0.5, hi: 1.6 },
        }
    }
}

impl fmt::Display for Knob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Knob {
    type Err = ImagingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "brightness" | "b" => Ok(Knob::Brightness),
            "contrast" | "c" => Ok(Knob::Contrast),
            "color_saturation" | "color" | "saturation" | "colour" => Ok(Knob::ColorSaturation),
            "sharpness" | "sharp" => Ok(Knob::Sharpness),
            other => Err(ImagingError::UnknownKnob(other.to_string())),
        }
    }
}

/// A full four-knob setting of blend factors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnobConfig {
    pub brightness: f64,
    pub contrast: f64,
    pub color_saturation: f64,
    pub sharpness: f64,
}

impl Default for KnobConfig {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl KnobConfig {
    pub const IDENTITY: KnobConfig = KnobConfig {
        brightness: 1.0,
        contrast: 1.0,
        color_saturation: 1.0,
        sharpness: 1.0,
    };

    pub fn new(brightness: f64, contrast: f64, color_saturation: f64, sharpness: f64) -> Self {
        Self {
            brightness,
            contrast,
            color_saturation,
            sharpness,
        }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [
            self.brightness,
            self.contrast,
            self.color_saturation,
            self.sharpness,
        ]
    }

    pub fn get(&self, knob: Knob) -> f64 {
        self.to_array()[knob.index()]
    }

    pub fn with(mut self, knob: Knob, factor: f64) -> Self {
        match knob {
            Knob::Brightness => self.brightness = factor,
            Knob::Contrast => self.contrast = factor,
            Knob::ColorSaturation => self.color_saturation = factor,
            Knob::Sharpness => self.sharpness = factor,
        }
        self
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Whether every factor lies inside the knob's camera-equivalent range.
    pub fn in_camera_range(&self) -> bool {
        Knob::ALL
            .iter()
            .all(|&k| k.camera_range().contains(self.get(k)))
    }

    /// Lexicographic comparison on (brightness, contrast, saturation, sharpness).
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let a = self.to_array();
        let b = other.to_array();
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

impl fmt::Display for KnobConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<{:.3}, {:.3}, {:.3}, {:.3}>",
            self.brightness, self.contrast, self.color_saturation, self.sharpness
        )
    }
}

/// Physical camera settings, each an integer in 0..=100.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CameraParams {
    pub brightness: u8,
    pub contrast: u8,
    pub color_saturation: u8,
    pub sharpness: u8,
}

impl Default for CameraParams {
    fn default() -> Self {
        Self {
            brightness: Self::DEFAULT_VALUE,
            contrast: Self::DEFAULT_VALUE,
            color_saturation: Self::DEFAULT_VALUE,
            sharpness: Self::DEFAULT_VALUE,
        }
    }
}

impl CameraParams {
    pub const MAX: u8 = 100;
    pub const DEFAULT_VALUE: u8 = 50;

    pub fn get(&self, knob: Knob) -> u8 {
        match knob {
            Knob::Brightness => self.brightness,
            Knob::Contrast => self.contrast,
            Knob::ColorSaturation => self.color_saturation,
            Knob::Sharpness => self.sharpness,
        }
    }

    pub fn set(&mut self, knob: Knob, value: u8) -> Result<(), ImagingError> {
        if value > Self::MAX {
            return Err(ImagingError::CameraValue(value as i64));
        }
        match knob {
            Knob::Brightness => self.brightness = value,
            Knob::Contrast => self.contrast = value,
            Knob::ColorSaturation => self.color_saturation = value,
            Knob::Sharpness => self.sharpness = value,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knob_names_round_trip() {
        for k in Knob::ALL {
            assert_eq!(k.name().parse::<Knob>().unwrap(), k);
        }
        assert!("gamma".parse::<Knob>().is_err());
    }

    #[test]
    fn camera_params_reject_out_of_range() {
        let mut p = CameraParams::default();
        assert!(p.set(Knob::Contrast, 101).is_err());
        p.set(Knob::Contrast, 100).unwrap();
        assert_eq!(p.get(Knob::Contrast), 100);
    }

    #[test]
    fn identity_is_in_range() {
        assert!(KnobConfig::IDENTITY.in_camera_range());
        assert!(!KnobConfig::new(0.5, 1.0, 1.0, 1.0).in_camera_range());
    }
}
