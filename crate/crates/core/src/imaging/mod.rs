//! Pixel-level primitives: the RGB buffer, the four virtual-knob transforms,
//! luma/saturation planes and 3×3 convolution.

mod buffer;
mod enhance;
mod filter;
mod io;
mod knob;

pub use buffer::ImageBuffer;
pub use enhance::{apply_config, apply_knob};
pub use filter::{
    convolve3x3, luma_of, saturation_channel, saturation_of, to_luma, Plane, LUMA_WEIGHTS, SMOOTH_KERNEL,
};
pub use io::{decode_png, encode_png, encode_ppm, read_image, write_image};
pub use knob::{CameraParams, Knob, KnobConfig, KnobRange};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("image has zero width or height")]
    Empty,
    #[error("pixel data length {actual} does not match dimensions (expected {expected})")]
    DataLength { expected: usize, actual: usize },
    #[error("knob factor must be finite and >= 0, got {0}")]
    Factor(f64),
    #[error("convolution kernel contains non-finite weights")]
    Kernel,
    #[error("region outside image bounds")]
    OutOfBounds,
    #[error("unknown knob `{0}`")]
    UnknownKnob(String),
    #[error("camera parameter value {0} outside 0..=100")]
    CameraValue(i64),
    #[error("unsupported image format for `{0}` (expected .png or .ppm)")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Codec(#[from] image::ImageError),
}
