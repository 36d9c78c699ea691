//! Analytics-quality estimators and the frame gate built on them.

mod external;
mod gate;
mod oracle;
mod proxy;
mod registry;

pub use external::{parse_response, ExternalEstimator, Transport};
pub use gate::{AquaGate, GateDecision};
pub use oracle::OracleEstimator;
pub use proxy::ProxyEstimator;
pub use registry::{EstimatorRegistry, EstimatorSettings};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deteval::DetEvalError;
use crate::imaging::{ImageBuffer, ImagingError};

/// Largest detection class label: mAP (0..100) plus TP IoU × 100.
pub const MAX_DETECTION_LABEL: u32 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityEstimate {
    /// Normalized quality in [0, 1].
    pub value: f64,
    pub class_label: Option<u32>,
}

impl QualityEstimate {
    pub fn from_label(label: u32, max_label: u32) -> Self {
        Self {
            value: label as f64 / max_label as f64,
            class_label: Some(label),
        }
    }

    pub fn from_value(value: f64) -> Self {
        Self {
            value,
            class_label: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("mAP {map} or TP IoU {iou} out of range")]
    LabelInput { map: f64, iou: f64 },
    #[error("frame has no ground truth")]
    MissingGroundTruth,
    #[error("invalid estimator settings: {0}")]
    Settings(String),
    #[error("unknown estimator `{0}`")]
    Unknown(String),
    #[error("estimator timed out")]
    Timeout,
    #[error("malformed estimator reply `{0}`")]
    Malformed(String),
    #[error("estimator unavailable: {0}")]
    Unavailable(String),
    #[error(transparent)]
    Detection(#[from] DetEvalError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub trait QualityEstimator: Send {
    fn name(&self) -> &str;
    fn estimate(&mut self, img: &ImageBuffer) -> Result<QualityEstimate, EstimatorError>;
}

/// Detection class label `round(map + iou·100)`, clamped to 0..=200.
pub fn detection_label(map: f64, mean_tp_iou: f64) -> Result<u32, EstimatorError> {
    if !(0.0..=100.0).contains(&map) || !(0.0..=1.0).contains(&mean_tp_iou) {
        return Err(EstimatorError::LabelInput { map, iou: mean_tp_iou });
    }
    Ok((map + mean_tp_iou * 100.0).round().clamp(0.0, MAX_DETECTION_LABEL as f64) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(detection_label(100.0, 1.0).unwrap(), 200);
        assert_eq!(detection_label(0.0, 0.0).unwrap(), 0);
        assert_eq!(detection_label(63.0, 0.72).unwrap(), 135);
        assert!(detection_label(101.0, 0.5).is_err());
        assert!(detection_label(50.0, -0.1).is_err());
        assert!(detection_label(f64::NAN, 0.1).is_err());
    }
}
