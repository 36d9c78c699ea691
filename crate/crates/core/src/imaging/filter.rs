use super::{ImageBuffer, ImagingError};

/// Luma weights applied to (R, G, B).
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Smoothing kernel used as the degenerate image of the sharpness knob.
pub const SMOOTH_KERNEL: [[f64; 3]; 3] = [
    [1.0 / 13.0, 1.0 / 13.0, 1.0 / 13.0],
    [1.0 / 13.0, 5.0 / 13.0, 1.0 / 13.0],
    [1.0 / 13.0, 1.0 / 13.0, 1.0 / 13.0],
];

/// A single-channel floating point matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Sample with edge replication for out-of-range coordinates.
    #[inline]
    pub fn at_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

#[inline]
pub fn luma_of(rgb: [u8; 3]) -> f64 {
    LUMA_WEIGHTS[0] * rgb[0] as f64 + LUMA_WEIGHTS[1] * rgb[1] as f64 + LUMA_WEIGHTS[2] * rgb[2] as f64
}

/// HSV saturation of one pixel: (max - min) / max, zero for black.
#[inline]
pub fn saturation_of(rgb: [u8; 3]) -> f64 {
    let max = rgb[0].max(rgb[1]).max(rgb[2]);
    if max == 0 {
        return 0.0;
    }
    let min = rgb[0].min(rgb[1]).min(rgb[2]);
    (max - min) as f64 / max as f64
}

pub fn to_luma(img: &ImageBuffer) -> Plane {
    Plane {
        width: img.width(),
        height: img.height(),
        data: img.pixels().map(luma_of).collect(),
    }
}

pub fn saturation_channel(img: &ImageBuffer) -> Plane {
    Plane {
        width: img.width(),
        height: img.height(),
        data: img.pixels().map(saturation_of).collect(),
    }
}

/// Per-channel 3×3 correlation with edge replication, unrounded.
pub(crate) fn convolve3x3_f64(img: &ImageBuffer, kernel: &[[f64; 3]; 3]) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let raw: Vec<f64> = img.as_raw().iter().map(|&v| v as f64).collect();
    let mut out = vec![0.0; raw.len()];
    let k: [f64; 9] = std::array::from_fn(|i| kernel[i / 3][i % 3]);
    let border = |x: usize, y: usize, out: &mut [f64]| {
        let rows = [y.saturating_sub(1), y, (y + 1).min(h - 1)];
        let cols = [x.saturating_sub(1), x, (x + 1).min(w - 1)];
        let mut acc = [0.0f64; 3];
        for (ky, &yy) in rows.iter().enumerate() {
            for (kx, &xx) in cols.iter().enumerate() {
                let kv = k[ky * 3 + kx];
                let i = (yy * w + xx) * 3;
                for c in 0..3 {
                    acc[c] += kv * raw[i + c];
                }
            }
        }
        let o = (y * w + x) * 3;
        out[o..o + 3].copy_from_slice(&acc);
    };
    for y in 0..h {
        if y == 0 || y + 1 == h || w < 3 {
            for x in 0..w {
                border(x, y, &mut out);
            }
            continue;
        }
        border(0, y, &mut out);
        border(w - 1, y, &mut out);
        let stride = w * 3;
        let (up, mid, down) = (&raw[(y - 1) * stride..y * stride], &raw[y * stride..(y + 1) * stride], &raw[(y + 1) * stride..(y + 2) * stride]);
        let dst = &mut out[y * stride..(y + 1) * stride];
        for i in 3..stride - 3 {
            dst[i] = k[0] * up[i - 3] + k[1] * up[i] + k[2] * up[i + 3]
                + k[3] * mid[i - 3] + k[4] * mid[i] + k[5] * mid[i + 3]
                + k[6] * down[i - 3] + k[7] * down[i] + k[8] * down[i + 3];
        }
    }
    out
}

/// 3×3 correlation of every channel, replicating edge pixels at the borders.
pub fn convolve3x3(img: &ImageBuffer, kernel: &[[f64; 3]; 3]) -> Result<ImageBuffer, ImagingError> {
    if kernel.iter().flatten().any(|k| !k.is_finite()) {
        return Err(ImagingError::Kernel);
    }
    let out = convolve3x3_f64(img, kernel);
    Ok(img.with_float_data(out.into_iter()))
}
