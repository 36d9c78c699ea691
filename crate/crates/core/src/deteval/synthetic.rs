use serde::{Deserialize, Serialize};

use super::{BoundingBox, DetEvalError};
use crate::imaging::{apply_config, ImageBuffer, KnobConfig};
use crate::metrics::{extract_features, FeatureTuple};

const RATIO_EPS: f64 = 1e-3;
const GOLDEN: f64 = 0.618034;
const MAX_SHIFT: f64 = 0.25;

pub trait Detector: Send + Sync {
    fn detect(&self, img: &ImageBuffer) -> Result<Vec<BoundingBox>, DetEvalError>;
}

/// Detection quality as a function of the frame's feature ratios
/// (measured / scene reference), one ratio per knob.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QualityResponse {
    Constant { value: f64 },
    /// Gaussian bump `exp(-½ Σ ((r_i − peak_i) / width_i)²)`.
    Unimodal { peak: [f64; 4], width: [f64; 4] },
}

impl QualityResponse {
    pub fn validate(&self) -> Result<(), DetEvalError> {
        match self {
            Self::Constant { value } if !(0.0..=1.0).contains(value) => {
                Err(DetEvalError::Response(format!("constant {value} outside [0, 1]")))
            }
            Self::Unimodal { peak, width }
                if peak.iter().any(|p| !p.is_finite()) || width.iter().any(|w| !(w.is_finite() && *w > 0.0)) =>
            {
                Err(DetEvalError::Response("peak must be finite and widths positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, ratios: [f64; 4]) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Unimodal { peak, width } => {
                let d2: f64 = (0..4).map(|i| ((ratios[i] - peak[i]) / width[i]).powi(2)).sum();
                (-0.5 * d2).exp()
            }
        }
    }

    /// A unimodal response whose peak sits exactly at the feature ratios
    /// that `config` produces on `base`.
    pub fn planted(base: &ImageBuffer, config: &KnobConfig, width: [f64; 4]) -> Result<Self, DetEvalError> {
        let reference = extract_features(base);
        let rendered = extract_features(&apply_config(base, config)?);
        let r = Self::Unimodal {
            peak: rendered.ratio_to(&reference, RATIO_EPS),
            width,
        };
        r.validate()?;
        Ok(r)
    }
}

/// Deterministic stand-in for a trained detector. It reads the ground truth
/// carried by synthetic frames and degrades it according to a
/// [`QualityResponse`]: box `i` survives iff `frac((i+1)·φ) < q`, survivors
/// are shifted right by `0.25·(1−q)` of their width and scored `q`.
#[derive(Clone, Debug)]
pub struct SyntheticDetector {
    response: QualityResponse,
}

impl SyntheticDetector {
    pub fn new(response: QualityResponse) -> Result<Self, DetEvalError> {
        response.validate()?;
        Ok(Self { response })
    }

    pub fn response(&self) -> &QualityResponse {
        &self.response
    }

    pub fn ratios(img: &ImageBuffer) -> Result<[f64; 4], DetEvalError> {
        let reference = img
            .tag()
            .and_then(|t| t.reference.as_ref())
            .ok_or(DetEvalError::MissingTag)?;
        Ok(extract_features(img).ratio_to(reference, RATIO_EPS))
    }

    pub fn quality(&self, img: &ImageBuffer) -> Result<f64, DetEvalError> {
        Ok(self.response.eval(Self::ratios(img)?).clamp(0.0, 1.0))
    }

    pub fn quality_for_features(&self, features: &FeatureTuple, reference: &FeatureTuple) -> f64 {
        self.response.eval(features.ratio_to(reference, RATIO_EPS)).clamp(0.0, 1.0)
    }
}

impl Detector for SyntheticDetector {
    fn detect(&self, img: &ImageBuffer) -> Result<Vec<BoundingBox>, DetEvalError> {
        let tag = img.tag().ok_or(DetEvalError::MissingTag)?;
        let q = self.quality(img)?;
        let shift = MAX_SHIFT * (1.0 - q);
        Ok(tag
            .gt
            .iter()
            .enumerate()
            .filter(|(i, _)| ((*i as f64 + 1.0) * GOLDEN).fract() < q)
            .map(|(_, b)| {
                let dx = shift * b.width();
                BoundingBox {
                    x1: b.x1 + dx,
                    x2: b.x2 + dx,
                    score: Some(q),
                    ..*b
                }
            })
            .collect())
    }
}
