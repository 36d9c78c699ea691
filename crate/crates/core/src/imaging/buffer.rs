use std::sync::Arc;

use crate::scene::SceneTag;

use super::ImagingError;

/// An 8-bit RGB raster stored row-major as interleaved `[r, g, b]` triples.
///
/// Frames produced by the synthetic scene generator carry a [`SceneTag`]
/// describing their ground truth. The tag rides along through every
/// transform; equality only looks at dimensions and pixels.
#[derive(Clone, Debug)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
    tag: Option<Arc<SceneTag>>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::Empty);
        }
        if data.len() != width * height * 3 {
            return Err(ImagingError::DataLength {
                expected: width * height * 3,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
            tag: None,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self, ImagingError> {
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Self::new(width, height, data)
    }

    pub fn from_fn<F>(width: usize, height: usize, mut f: F) -> Result<Self, ImagingError>
    where
        F: FnMut(usize, usize) -> [u8; 3],
    {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    pub fn tag(&self) -> Option<&Arc<SceneTag>> {
        self.tag.as_ref()
    }

    pub fn with_tag(mut self, tag: Option<Arc<SceneTag>>) -> Self {
        self.tag = tag;
        self
    }

    pub fn set_tag(&mut self, tag: Option<Arc<SceneTag>>) {
        self.tag = tag;
    }

    /// True when every pixel has R = G = B.
    pub fn is_gray(&self) -> bool {
        self.pixels().all(|[r, g, b]| r == g && g == b)
    }

    /// Copies the `w`×`h` rectangle at (`x0`, `y0`). The tag is carried over.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self, ImagingError> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(ImagingError::OutOfBounds);
        }
        let mut data = Vec::with_capacity(w * h * 3);
        for y in y0..y0 + h {
            let start = (y * self.width + x0) * 3;
            data.extend_from_slice(&self.data[start..start + w * 3]);
        }
        Ok(Self {
            width: w,
            height: h,
            data,
            tag: self.tag.clone(),
        })
    }

    /// Writes `src` into this buffer with its top-left corner at (`x0`, `y0`).
    pub fn blit(&mut self, src: &ImageBuffer, x0: usize, y0: usize) -> Result<(), ImagingError> {
        if x0 + src.width > self.width || y0 + src.height > self.height {
            return Err(ImagingError::OutOfBounds);
        }
        for y in 0..src.height {
            let dst = ((y0 + y) * self.width + x0) * 3;
            let s = y * src.width * 3;
            self.data[dst..dst + src.width * 3].copy_from_slice(&src.data[s..s + src.width * 3]);
        }
        Ok(())
    }

    /// Builds a buffer of the same size and tag from floating-point channel
    /// values, rounding to nearest and clamping into [0, 255].
    pub(crate) fn with_float_data(&self, values: impl Iterator<Item = f64>) -> Self {
        let data: Vec<u8> = values.map(to_channel).collect();
        debug_assert_eq!(data.len(), self.data.len());
        Self {
            width: self.width,
            height: self.height,
            data,
            tag: self.tag.clone(),
        }
    }
}

impl PartialEq for ImageBuffer {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.data == other.data
    }
}

impl Eq for ImageBuffer {}

#[inline]
pub(crate) fn to_channel(v: f64) -> u8 {
    // Round half away from zero; NaN casts to 0.
    (v.clamp(0.0, 255.0) + 0.5) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(ImageBuffer::new(0, 3, vec![]), Err(ImagingError::Empty)));
        assert!(matches!(
            ImageBuffer::new(2, 2, vec![0; 11]),
            Err(ImagingError::DataLength { expected: 12, actual: 11 })
        ));
    }

    #[test]
    fn crop_and_blit_round_trip() {
        let img = ImageBuffer::from_fn(5, 4, |x, y| [x as u8, y as u8, (x * y) as u8]).unwrap();
        let part = img.crop(1, 1, 3, 2).unwrap();
        assert_eq!(part.pixel(0, 0), [1, 1, 1]);
        let mut canvas = ImageBuffer::filled(5, 4, [0, 0, 0]).unwrap();
        canvas.blit(&part, 1, 1).unwrap();
        assert_eq!(canvas.pixel(3, 2), img.pixel(3, 2));
        assert!(img.crop(3, 3, 3, 3).is_err());
    }

    #[test]
    fn channel_rounding_clamps() {
        assert_eq!(to_channel(-3.0), 0);
        assert_eq!(to_channel(254.5), 255);
        assert_eq!(to_channel(300.0), 255);
        assert_eq!(to_channel(f64::NAN), 0);
    }
}
