use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EstimatorError, ExternalEstimator, OracleEstimator, ProxyEstimator, QualityEstimator, Transport};
use crate::deteval::{QualityResponse, SyntheticDetector};
use crate::metrics::FeatureTuple;

/// Union of the knobs the built-in estimators understand; each factory
/// reads the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorSettings {
    /// Detector response for `oracle`.
    pub response: Option<QualityResponse>,
    /// Target features for `proxy`.
    pub ideal: Option<FeatureTuple>,
    pub weights: [f64; 4],
    pub transport: Option<Transport>,
    pub timeout_ms: u64,
    pub max_label: u32,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            response: None,
            ideal: None,
            weights: [0.25; 4],
            transport: None,
            timeout_ms: 1_000,
            max_label: super::MAX_DETECTION_LABEL,
        }
    }
}

pub type EstimatorFactory =
    Box<dyn Fn(&EstimatorSettings) -> Result<Box<dyn QualityEstimator>, EstimatorError> + Send + Sync>;

/// Estimators selectable by name at run time.
pub struct EstimatorRegistry {
    factories: BTreeMap<String, EstimatorFactory>,
}

impl EstimatorRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// `oracle`, `proxy` and `external`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("oracle", |s| {
            let response = s
                .response
                .clone()
                .ok_or_else(|| EstimatorError::Settings("oracle needs a detector response".into()))?;
            Ok(Box::new(OracleEstimator::new(Arc::new(SyntheticDetector::new(response)?))))
        });
        r.register("proxy", |s| {
            let ideal = s
                .ideal
                .ok_or_else(|| EstimatorError::Settings("proxy needs ideal features".into()))?;
            Ok(Box::new(ProxyEstimator::new(ideal, s.weights)?))
        });
        r.register("external", |s| {
            let transport = s
                .transport
                .clone()
                .ok_or_else(|| EstimatorError::Settings("external needs a transport".into()))?;
            Ok(Box::new(
                ExternalEstimator::new(transport, Duration::from_millis(s.timeout_ms)).with_max_label(s.max_label),
            ))
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&EstimatorSettings) -> Result<Box<dyn QualityEstimator>, EstimatorError> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn create(&self, name: &str, settings: &EstimatorSettings) -> Result<Box<dyn QualityEstimator>, EstimatorError> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| EstimatorError::Unknown(name.to_string()))?;
        factory(settings)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }
}

impl Default for EstimatorRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_by_name() {
        let r = EstimatorRegistry::with_builtins();
        assert_eq!(r.names().collect::<Vec<_>>(), ["external", "oracle", "proxy"]);
        let mut s = EstimatorSettings::default();
        assert!(r.create("proxy", &s).is_err());
        s.ideal = Some(FeatureTuple::new(100.0, 30.0, 0.3, 10.0));
        assert_eq!(r.create("proxy", &s).unwrap().name(), "proxy");
        assert!(matches!(r.create("dnn", &s), Err(EstimatorError::Unknown(_))));
    }
}
