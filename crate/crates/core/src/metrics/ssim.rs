//! Structural similarity on luma, plus a per-channel RGB variant.
//!
//! Local statistics use an 11×11 Gaussian window (σ = 1.5) evaluated only
//! where the window fits entirely inside the image; the score is the mean of
//! the local SSIM map. Constants: K1 = 0.01, K2 = 0.03, L = 255.

use crate::imaging::{to_luma, ImageBuffer, Plane};

use super::MetricsError;

pub const WINDOW: usize = 11;
pub const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const DYNAMIC_RANGE: f64 = 255.0;

fn gaussian_taps() -> [f64; WINDOW] {
    let c = (WINDOW / 2) as f64;
    let mut taps: [f64; WINDOW] = std::array::from_fn(|i| {
        let d = i as f64 - c;
        (-(d * d) / (2.0 * SIGMA * SIGMA)).exp()
    });
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable Gaussian filter, "valid" region only.
fn filter_valid(src: &[f64], width: usize, height: usize, taps: &[f64; WINDOW]) -> Vec<f64> {
    let ow = width - WINDOW + 1;
    let oh = height - WINDOW + 1;
    let mut horiz = vec![0.0; ow * height];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for x in 0..ow {
            horiz[y * ow + x] = taps.iter().zip(&row[x..x + WINDOW]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * horiz[(y + k) * ow + x])
                .sum();
        }
    }
    out
}

/// Mean SSIM between two luma planes of identical size.
pub fn ssim_planes(a: &Plane, b: &Plane) -> Result<f64, MetricsError> {
    if a.width != b.width || a.height != b.height {
        return Err(MetricsError::DimensionMismatch {
            left: (a.width, a.height),
            right: (b.width, b.height),
        });
    }
    if a.width < WINDOW || a.height < WINDOW {
        return Err(MetricsError::SmallerThanWindow {
            width: a.width,
            height: a.height,
        });
    }
    let (w, h) = (a.width, a.height);
    let taps = gaussian_taps();
    let c1 = (K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (K2 * DYNAMIC_RANGE).powi(2);

    let aa: Vec<f64> = a.data.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.data.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();

    let mu_a = filter_valid(&a.data, w, h, &taps);
    let mu_b = filter_valid(&b.data, w, h, &taps);
    let e_aa = filter_valid(&aa, w, h, &taps);
    let e_bb = filter_valid(&bb, w, h, &taps);
    let e_ab = filter_valid(&ab, w, h, &taps);

    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        let num = (2.0 * (ma * mb) + c1) * (2.0 * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        total += num / den;
    }
    Ok(total / mu_a.len() as f64)
}

/// Mean SSIM between two RGB images, computed on luma.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch {
            left: (a.width(), a.height()),
            right: (b.width(), b.height()),
        });
    }
    ssim_planes(&to_luma(a), &to_luma(b))
}

/// Mean of the per-channel SSIM over R, G and B. Unlike [`ssim`] it sees
/// changes that leave luma untouched, such as desaturation.
pub fn ssim_rgb(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch {
            left: (a.width(), a.height()),
            right: (b.width(), b.height()),
        });
    }
    let channel = |img: &ImageBuffer, c: usize| Plane {
        width: img.width(),
        height: img.height(),
        data: img.as_raw().iter().skip(c).step_by(3).map(|&v| v as f64).collect(),
    };
    let mut total = 0.0;
    for c in 0..3 {
        total += ssim_planes(&channel(a, c), &channel(b, c))?;
    }
    Ok(total / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(seed: u32) -> ImageBuffer {
        ImageBuffer::from_fn(24, 20, |x, y| {
            let v = ((x as u32 * 37 + y as u32 * 91 + seed * 13) % 251) as u8;
            [v, v.wrapping_mul(3), 255 - v]
        })
        .unwrap()
    }

    #[test]
    fn self_similarity_is_exactly_one() {
        let img = textured(1);
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
    }

    #[test]
    fn symmetric() {
        let (a, b) = (textured(1), textured(2));
        assert_eq!(ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        assert!(ssim(&a, &b).unwrap() < 1.0);
    }

    #[test]
    fn errors() {
        let a = ImageBuffer::filled(12, 12, [0, 0, 0]).unwrap();
        let b = ImageBuffer::filled(12, 13, [0, 0, 0]).unwrap();
        assert!(matches!(ssim(&a, &b), Err(MetricsError::DimensionMismatch { .. })));
        let c = ImageBuffer::filled(10, 30, [0, 0, 0]).unwrap();
        assert!(matches!(ssim(&c, &c), Err(MetricsError::SmallerThanWindow { .. })));
    }

    #[test]
    fn taps_normalized() {
        let t = gaussian_taps();
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(t[5] > t[4] && t[4] == t[6]);
    }
}
