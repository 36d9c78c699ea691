use std::sync::Arc;

use super::{detection_label, EstimatorError, QualityEstimate, QualityEstimator, MAX_DETECTION_LABEL};
use crate::deteval::{evaluate, Detector, DEFAULT_IOU_THRESHOLD};
use crate::imaging::ImageBuffer;

/// Scores a frame with the exact class label a trained estimator would be
/// taught to predict: the detector's mAP and TP IoU against the frame's
/// ground truth.
pub struct OracleEstimator {
    detector: Arc<dyn Detector>,
}

impl OracleEstimator {
    pub fn new(detector: Arc<dyn Detector>) -> Self {
        Self { detector }
    }
}

impl QualityEstimator for OracleEstimator {
    fn name(&self) -> &str {
        "oracle"
    }

    fn estimate(&mut self, img: &ImageBuffer) -> Result<QualityEstimate, EstimatorError> {
        let gt = &img.tag().ok_or(EstimatorError::MissingGroundTruth)?.gt;
        let dets = self.detector.detect(img)?;
        let r = evaluate(&dets, gt, DEFAULT_IOU_THRESHOLD);
        let label = detection_label(r.map, r.mean_tp_iou)?;
        Ok(QualityEstimate::from_label(label, MAX_DETECTION_LABEL))
    }
}
