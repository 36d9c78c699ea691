use serde::{Deserialize, Serialize};

use crate::imaging::{luma_of, saturation_of, ImageBuffer, Plane};

/// Measured ⟨brightness, contrast, color saturation, sharpness⟩ of an image.
///
/// * brightness: mean luma
/// * contrast: RMS deviation of luma (population standard deviation)
/// * color_saturation: mean HSV saturation, in [0, 1]
/// * sharpness: mean magnitude of the 3×3 Sobel gradient of luma
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureTuple {
    pub brightness: f64,
    pub contrast: f64,
    pub color_saturation: f64,
    pub sharpness: f64,
}

impl FeatureTuple {
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

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite() && *v >= 0.0)
    }

    /// Component-wise `self / denom`, with denominators below `eps`
    /// clamped to `eps`.
    pub fn ratio_to(&self, denom: &FeatureTuple, eps: f64) -> [f64; 4] {
        let a = self.to_array();
        let b = denom.to_array();
        std::array::from_fn(|i| a[i] / b[i].max(eps))
    }

    /// Arithmetic mean of a non-empty collection.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a FeatureTuple>) -> Option<FeatureTuple> {
        let mut acc = [0.0; 4];
        let mut n = 0usize;
        for t in items {
            for (a, v) in acc.iter_mut().zip(t.to_array()) {
                *a += v;
            }
            n += 1;
        }
        (n > 0).then(|| FeatureTuple::from_array(acc.map(|a| a / n as f64)))
    }
}

fn sobel_at(luma: &Plane, x: usize, y: usize) -> f64 {
    let (x, y) = (x as isize, y as isize);
    let p = |dx: isize, dy: isize| luma.at_clamped(x + dx, y + dy);
    let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
    let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
    (gx * gx + gy * gy).sqrt()
}

/// Mean 3×3 Sobel gradient magnitude with edge replication.
fn sobel_magnitude_mean(luma: &Plane) -> f64 {
    let (w, h) = (luma.width, luma.height);
    let d = &luma.data;
    let mut total = 0.0;
    for y in 0..h {
        if y == 0 || y + 1 == h || w < 3 {
            total += (0..w).map(|x| sobel_at(luma, x, y)).sum::<f64>();
            continue;
        }
        total += sobel_at(luma, 0, y) + sobel_at(luma, w - 1, y);
        let (up, mid, down) = (&d[(y - 1) * w..y * w], &d[y * w..(y + 1) * w], &d[(y + 1) * w..(y + 2) * w]);
        for x in 1..w - 1 {
            let gx = (up[x + 1] + 2.0 * mid[x + 1] + down[x + 1]) - (up[x - 1] + 2.0 * mid[x - 1] + down[x - 1]);
            let gy = (down[x - 1] + 2.0 * down[x] + down[x + 1]) - (up[x - 1] + 2.0 * up[x] + up[x + 1]);
            total += (gx * gx + gy * gy).sqrt();
        }
    }
    total / (w * h) as f64
}

/// Measures the four features of an image. The buffer type guarantees a
/// non-empty image.
pub fn extract_features(img: &ImageBuffer) -> FeatureTuple {
    let n = img.pixel_count() as f64;
    let luma = Plane {
        width: img.width(),
        height: img.height(),
        data: img.pixels().map(luma_of).collect(),
    };
    let mean = luma.mean();
    let var = luma.data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sat = img.pixels().map(saturation_of).sum::<f64>() / n;
    FeatureTuple {
        brightness: mean,
        contrast: var.sqrt(),
        color_saturation: sat,
        sharpness: sobel_magnitude_mean(&luma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_images() {
        let gray = ImageBuffer::filled(8, 8, [128, 128, 128]).unwrap();
        let f = extract_features(&gray);
        assert!((f.brightness - 128.0).abs() < 1e-9);
        assert!(f.contrast < 1e-6);
        assert_eq!(f.color_saturation, 0.0);
        assert!(f.sharpness < 1e-9);

        let black = ImageBuffer::filled(5, 3, [0, 0, 0]).unwrap();
        assert_eq!(extract_features(&black), FeatureTuple::default());
    }

    #[test]
    fn ratio_guard() {
        let a = FeatureTuple::new(10.0, 1.0, 0.5, 2.0);
        let b = FeatureTuple::new(5.0, 0.0, 0.5, 4.0);
        let r = a.ratio_to(&b, 1e-3);
        assert_eq!(r, [2.0, 1000.0, 1.0, 0.5]);
    }
}
