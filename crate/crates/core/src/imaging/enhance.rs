//! The four virtual knobs.
//!
//! Every knob blends the input image `I` with a knob-specific degenerate
//! image `D`: `O = clamp((1 - f) * D + f * I)`. A factor of 1 reproduces the
//! input, 0 yields the degenerate image, and factors above 1 extrapolate away
//! from it.

use super::filter::{convolve3x3_f64, luma_of, SMOOTH_KERNEL};
use super::{ImageBuffer, ImagingError, Knob, KnobConfig};

/// The image a knob blends away from.
pub(crate) enum Degenerate {
    /// Same value on every channel of every pixel.
    Uniform(f64),
    /// One gray value per pixel, shared by the three channels.
    PerPixel(Vec<f64>),
    /// A full RGB image.
    PerChannel(Vec<f64>),
}

pub(crate) trait Enhancer: Sync {
    fn degenerate(&self, img: &ImageBuffer) -> Degenerate;
}

struct Brightness;
struct Contrast;
struct ColorSaturation;
struct Sharpness;

impl Enhancer for Brightness {
    fn degenerate(&self, _img: &ImageBuffer) -> Degenerate {
        Degenerate::Uniform(0.0)
    }
}

impl Enhancer for Contrast {
    fn degenerate(&self, img: &ImageBuffer) -> Degenerate {
        let mean = img.pixels().map(luma_of).sum::<f64>() / img.pixel_count() as f64;
        Degenerate::Uniform(mean)
    }
}

impl Enhancer for ColorSaturation {
    fn degenerate(&self, img: &ImageBuffer) -> Degenerate {
        Degenerate::PerPixel(img.pixels().map(luma_of).collect())
    }
}

impl Enhancer for Sharpness {
    fn degenerate(&self, img: &ImageBuffer) -> Degenerate {
        Degenerate::PerChannel(convolve3x3_f64(img, &SMOOTH_KERNEL))
    }
}

pub(crate) fn enhancer(knob: Knob) -> &'static dyn Enhancer {
    match knob {
        Knob::Brightness => &Brightness,
        Knob::Contrast => &Contrast,
        Knob::ColorSaturation => &ColorSaturation,
        Knob::Sharpness => &Sharpness,
    }
}

fn check_factor(factor: f64) -> Result<(), ImagingError> {
    if !factor.is_finite() || factor < 0.0 {
        return Err(ImagingError::Factor(factor));
    }
    Ok(())
}

/// Applies a single knob with the given blend factor.
pub fn apply_knob(img: &ImageBuffer, knob: Knob, factor: f64) -> Result<ImageBuffer, ImagingError> {
    check_factor(factor)?;
    let keep = 1.0 - factor;
    let raw = img.as_raw();
    let out = match enhancer(knob).degenerate(img) {
        Degenerate::Uniform(d) => {
            let base = keep * d;
            img.with_float_data(raw.iter().map(|&v| base + factor * v as f64))
        }
        Degenerate::PerPixel(gray) => img.with_float_data(
            raw.iter()
                .enumerate()
                .map(|(i, &v)| keep * gray[i / 3] + factor * v as f64),
        ),
        Degenerate::PerChannel(d) => img.with_float_data(
            raw.iter()
                .zip(d.iter())
                .map(|(&v, &dv)| keep * dv + factor * v as f64),
        ),
    };
    Ok(out)
}

/// Applies all four knobs in the order brightness, contrast, color
/// saturation, sharpness. Knobs at exactly 1.0 are skipped since the blend
/// reproduces its input bit for bit.
pub fn apply_config(img: &ImageBuffer, config: &KnobConfig) -> Result<ImageBuffer, ImagingError> {
    let mut current: Option<ImageBuffer> = None;
    for knob in Knob::ALL {
        let f = config.get(knob);
        check_factor(f)?;
        if f == 1.0 {
            continue;
        }
        let src = current.as_ref().unwrap_or(img);
        current = Some(apply_knob(src, knob, f)?);
    }
    Ok(current.unwrap_or_else(|| img.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::to_luma;

    fn ramp() -> ImageBuffer {
        ImageBuffer::from_fn(9, 7, |x, y| [(x * 25) as u8, (y * 30 + 10) as u8, ((x + y) * 12) as u8]).unwrap()
    }

    #[test]
    fn unit_factor_is_identity() {
        let img = ramp();
        for k in Knob::ALL {
            assert_eq!(apply_knob(&img, k, 1.0).unwrap(), img, "{k}");
        }
    }

    #[test]
    fn brightness_scales_uniform_gray() {
        let img = ImageBuffer::filled(4, 4, [100, 100, 100]).unwrap();
        let out = apply_knob(&img, Knob::Brightness, 1.5).unwrap();
        assert!(out.pixels().all(|p| p == [150, 150, 150]));
    }

    #[test]
    fn zero_saturation_is_gray() {
        let out = apply_knob(&ramp(), Knob::ColorSaturation, 0.0).unwrap();
        assert!(out.is_gray());
    }

    #[test]
    fn zero_contrast_is_uniform_mean() {
        let img = ramp();
        let mean = to_luma(&img).mean().round() as u8;
        let out = apply_knob(&img, Knob::Contrast, 0.0).unwrap();
        assert!(out.pixels().all(|p| p == [mean, mean, mean]));
    }

    #[test]
    fn negative_or_nan_factor_rejected() {
        assert!(apply_knob(&ramp(), Knob::Sharpness, -0.1).is_err());
        assert!(apply_knob(&ramp(), Knob::Sharpness, f64::NAN).is_err());
        assert!(apply_config(&ramp(), &KnobConfig::new(1.0, -1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn config_composes_in_fixed_order() {
        let img = ramp();
        let cfg = KnobConfig::new(1.2, 0.8, 1.0, 1.0);
        let expected = apply_knob(&apply_knob(&img, Knob::Brightness, 1.2).unwrap(), Knob::Contrast, 0.8).unwrap();
        assert_eq!(apply_config(&img, &cfg).unwrap(), expected);
        assert_eq!(apply_config(&img, &KnobConfig::IDENTITY).unwrap(), img);
    }

    #[test]
    fn sharpness_leaves_uniform_untouched() {
        let img = ImageBuffer::filled(6, 6, [40, 80, 120]).unwrap();
        for f in [0.0, 0.5, 1.6, 4.0] {
            assert_eq!(apply_knob(&img, Knob::Sharpness, f).unwrap(), img);
        }
        // Only brightness/contrast move a uniform image.
        let gray = ImageBuffer::filled(6, 6, [100, 100, 100]).unwrap();
        let out = apply_config(&gray, &KnobConfig::new(1.2, 1.7, 0.3, 1.5)).unwrap();
        assert!(out.pixels().all(|p| p == [120, 120, 120]));
    }
}
