use super::{EstimatorError, QualityEstimate, QualityEstimator};
use crate::imaging::ImageBuffer;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateDecision {
    Pass(QualityEstimate),
    Drop(Option<QualityEstimate>),
    /// Let through after `recovery_n` consecutive drops.
    ForcedPass(Option<QualityEstimate>),
}

impl GateDecision {
    pub fn passed(&self) -> bool {
        !matches!(self, Self::Drop(_))
    }
}

/// Drops frames scored below `drop_threshold`, but never more than
/// `recovery_n` in a row. An estimator error counts as a drop.
pub struct AquaGate {
    estimator: Box<dyn QualityEstimator>,
    drop_threshold: f64,
    recovery_n: usize,
    consecutive_drops: usize,
    last_error: Option<EstimatorError>,
}

impl AquaGate {
    pub fn new(estimator: Box<dyn QualityEstimator>, drop_threshold: f64, recovery_n: usize) -> Result<Self, EstimatorError> {
        if recovery_n == 0 || !drop_threshold.is_finite() {
            return Err(EstimatorError::Settings("recovery_n must be >= 1 and the threshold finite".into()));
        }
        Ok(Self {
            estimator,
            drop_threshold,
            recovery_n,
            consecutive_drops: 0,
            last_error: None,
        })
    }

    /// Decides on a precomputed estimate (`None` when the estimator failed).
    pub fn decide(&mut self, estimate: Option<QualityEstimate>) -> GateDecision {
        match estimate {
            Some(e) if e.value >= self.drop_threshold => {
                self.consecutive_drops = 0;
                GateDecision::Pass(e)
            }
            _ if self.consecutive_drops >= self.recovery_n => {
                self.consecutive_drops = 0;
                GateDecision::ForcedPass(estimate)
            }
            _ => {
                self.consecutive_drops += 1;
                GateDecision::Drop(estimate)
            }
        }
    }

    pub fn admit(&mut self, img: &ImageBuffer) -> GateDecision {
        let estimate = match self.estimator.estimate(img) {
            Ok(e) => Some(e),
            Err(e) => {
                self.last_error = Some(e);
                None
            }
        };
        self.decide(estimate)
    }

    pub fn take_last_error(&mut self) -> Option<EstimatorError> {
        self.last_error.take()
    }

    pub fn consecutive_drops(&self) -> usize {
        self.consecutive_drops
    }
}
