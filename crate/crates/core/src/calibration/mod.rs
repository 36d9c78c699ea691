//! Camera parameter to virtual knob mapping by SSIM matching against a
//! camera device.

mod calibrate;
mod device;
mod http;

pub use calibrate::{calibrate, default_camera_values, default_knob_grid, CalibrationPoint, KnobMap, CALIBRATION_STEP};
pub use device::{CameraDevice, HiddenMap, SyntheticCamera};
pub use http::{HttpCamera, HttpCameraConfig, SetMethod};

use thiserror::Error;

use crate::imaging::ImagingError;
use crate::metrics::MetricsError;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("camera error: {0}")]
    Device(String),
    #[error("knob grid is empty or has negative factors")]
    Grid,
    #[error("camera value {0} outside 0..=100")]
    CameraValue(u32),
    #[error("knob map: {0}")]
    Format(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
