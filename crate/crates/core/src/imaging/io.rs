use std::path::Path;

use image::{ImageFormat, RgbImage};

use super::{ImageBuffer, ImagingError};

fn format_for(path: &Path) -> Result<ImageFormat, ImagingError> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("png") => Ok(ImageFormat::Png),
        Some("ppm") | Some("pnm") => Ok(ImageFormat::Pnm),
        _ => Err(ImagingError::UnsupportedFormat(path.display().to_string())),
    }
}

fn from_rgb(rgb: RgbImage) -> Result<ImageBuffer, ImagingError> {
    let (w, h) = rgb.dimensions();
    ImageBuffer::new(w as usize, h as usize, rgb.into_raw())
}

fn to_rgb(img: &ImageBuffer) -> RgbImage {
    RgbImage::from_raw(img.width() as u32, img.height() as u32, img.as_raw().to_vec())
        .expect("buffer length checked at construction")
}

/// Reads a PNG or binary PPM file; other channel layouts are converted to RGB8.
pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer, ImagingError> {
    let path = path.as_ref();
    let fmt = format_for(path)?;
    let bytes = std::fs::read(path)?;
    let img = image::load_from_memory_with_format(&bytes, fmt)?;
    from_rgb(img.to_rgb8())
}

/// Writes PNG or binary (P6) PPM depending on the file extension.
pub fn write_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    let path = path.as_ref();
    let fmt = format_for(path)?;
    if fmt == ImageFormat::Pnm {
        std::fs::write(path, encode_ppm(img))?;
        return Ok(());
    }
    to_rgb(img).save_with_format(path, fmt)?;
    Ok(())
}

pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>, ImagingError> {
    let mut out = std::io::Cursor::new(Vec::new());
    to_rgb(img).write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

pub fn decode_png(bytes: &[u8]) -> Result<ImageBuffer, ImagingError> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?;
    from_rgb(img.to_rgb8())
}

/// Binary PPM with the minimal `P6\n<w> <h>\n255\n` header.
pub fn encode_ppm(img: &ImageBuffer) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.as_raw());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_and_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = ImageBuffer::from_fn(13, 7, |x, y| [x as u8 * 19, y as u8 * 31, (x ^ y) as u8]).unwrap();
        for name in ["a.ppm", "a.png"] {
            let p = dir.path().join(name);
            write_image(&img, &p).unwrap();
            assert_eq!(read_image(&p).unwrap(), img);
        }
        let ppm = std::fs::read(dir.path().join("a.ppm")).unwrap();
        assert!(ppm.starts_with(b"P6\n13 7\n255\n"));
        assert_eq!(decode_png(&encode_png(&img).unwrap()).unwrap(), img);
    }

    #[test]
    fn unknown_extension_rejected() {
        let img = ImageBuffer::filled(2, 2, [0, 0, 0]).unwrap();
        assert!(matches!(
            write_image(&img, "x.gif"),
            Err(ImagingError::UnsupportedFormat(_))
        ));
    }
}
