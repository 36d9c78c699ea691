use super::{EstimatorError, QualityEstimate, QualityEstimator};
use crate::imaging::ImageBuffer;
use crate::metrics::{extract_features, FeatureTuple};

/// Ground-truth-free surrogate: `exp(−Σ wᵢ·|fᵢ − idealᵢ| / idealᵢ)` over the
/// frame's features. A zero ideal component uses the plain absolute
/// difference.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxyEstimator {
    ideal: FeatureTuple,
    weights: [f64; 4],
}

impl ProxyEstimator {
    pub fn new(ideal: FeatureTuple, weights: [f64; 4]) -> Result<Self, EstimatorError> {
        if !ideal.is_valid() {
            return Err(EstimatorError::Settings("ideal features must be finite and >= 0".into()));
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(EstimatorError::Settings("weights must be >= 0 and sum to 1".into()));
        }
        Ok(Self { ideal, weights })
    }

    pub fn score(&self, f: &FeatureTuple) -> f64 {
        let (v, ideal) = (f.to_array(), self.ideal.to_array());
        let penalty: f64 = (0..4)
            .map(|i| {
                let d = (v[i] - ideal[i]).abs();
                self.weights[i] * if ideal[i] == 0.0 { d } else { d / ideal[i] }
            })
            .sum();
        (-penalty).exp()
    }
}

impl QualityEstimator for ProxyEstimator {
    fn name(&self) -> &str {
        "proxy"
    }

    fn estimate(&mut self, img: &ImageBuffer) -> Result<QualityEstimate, EstimatorError> {
        Ok(QualityEstimate::from_value(self.score(&extract_features(img))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_at_ideal() {
        let ideal = FeatureTuple::new(120.0, 40.0, 0.3, 0.0);
        let p = ProxyEstimator::new(ideal, [0.25; 4]).unwrap();
        assert_eq!(p.score(&ideal), 1.0);
        let off = FeatureTuple::new(132.0, 40.0, 0.3, 2.0);
        // 0.25·12/120 + 0.25·2 (absolute, ideal 0)
        assert!((p.score(&off) - (-0.025f64 - 0.5).exp()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_weights() {
        let ideal = FeatureTuple::new(1.0, 1.0, 1.0, 1.0);
        assert!(ProxyEstimator::new(ideal, [0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(ProxyEstimator::new(ideal, [1.5, -0.5, 0.0, 0.0]).is_err());
    }
}
