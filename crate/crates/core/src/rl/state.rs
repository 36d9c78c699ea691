use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Levels, RlError};
use crate::metrics::FeatureTuple;

pub const FEATURE_BINS: u8 = 4;

/// Equal-width bins per feature over ranges seen during a warm-up pass.
/// Values outside the range fall into the first or last bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureBinner {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl FeatureBinner {
    pub fn from_observations<'a>(obs: impl IntoIterator<Item = &'a FeatureTuple>) -> Result<Self, RlError> {
        let mut lo = [f64::INFINITY; 4];
        let mut hi = [f64::NEG_INFINITY; 4];
        for f in obs {
            for (i, v) in f.to_array().into_iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        if lo.iter().any(|v| !v.is_finite()) {
            return Err(RlError::Config("warm-up produced no finite feature observations".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn bin(&self, f: &FeatureTuple) -> [u8; 4] {
        let v = f.to_array();
        std::array::from_fn(|i| {
            let width = self.hi[i] - self.lo[i];
            if width <= 0.0 {
                return 0;
            }
            let b = ((v[i] - self.lo[i]) / width * FEATURE_BINS as f64).floor();
            b.clamp(0.0, (FEATURE_BINS - 1) as f64) as u8
        })
    }
}

/// Knob levels plus binned features: the tabular state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey {
    pub levels: Levels,
    pub bins: [u8; 4],
}

impl StateKey {
    pub fn new(levels: Levels, binner: &FeatureBinner, features: &FeatureTuple) -> Self {
        Self {
            levels,
            bins: binner.bin(features),
        }
    }
}

/// `k=<l0>,<l1>,<l2>,<l3>;f=<b0>,<b1>,<b2>,<b3>`
impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.levels;
        let b = self.bins;
        write!(f, "k={},{},{},{};f={},{},{},{}", l[0], l[1], l[2], l[3], b[0], b[1], b[2], b[3])
    }
}

fn parse_four<T: FromStr>(s: &str) -> Option<[T; 4]> {
    let v: Vec<T> = s.split(',').map(|p| p.parse().ok()).collect::<Option<_>>()?;
    v.try_into().ok()
}

impl FromStr for StateKey {
    type Err = RlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RlError::Parse(format!("bad state key `{s}`"));
        let (k, f) = s.split_once(';').ok_or_else(bad)?;
        let levels = parse_four(k.strip_prefix("k=").ok_or_else(bad)?).ok_or_else(bad)?;
        let bins: [u8; 4] = parse_four(f.strip_prefix("f=").ok_or_else(bad)?).ok_or_else(bad)?;
        if bins.iter().any(|&b| b >= FEATURE_BINS) {
            return Err(bad());
        }
        Ok(Self { levels, bins })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning() {
        let obs = [FeatureTuple::new(0.0, 10.0, 0.0, 5.0), FeatureTuple::new(100.0, 10.0, 1.0, 9.0)];
        let b = FeatureBinner::from_observations(&obs).unwrap();
        assert_eq!(b.bin(&FeatureTuple::new(0.0, 10.0, 0.3, 9.0)), [0, 0, 1, 3]);
        assert_eq!(b.bin(&FeatureTuple::new(100.0, 99.0, 0.5, 7.0)), [3, 0, 2, 2]);
        assert_eq!(b.bin(&FeatureTuple::new(-5.0, 0.0, 2.0, 100.0)), [0, 0, 3, 3]);
        assert!(FeatureBinner::from_observations(&[]).is_err());
    }

    #[test]
    fn key_text_round_trip() {
        let k = StateKey {
            levels: [-2, 0, 5, 1],
            bins: [3, 0, 1, 2],
        };
        assert_eq!(k.to_string(), "k=-2,0,5,1;f=3,0,1,2");
        assert_eq!(k.to_string().parse::<StateKey>().unwrap(), k);
        assert!("k=1,2,3;f=0,0,0,0".parse::<StateKey>().is_err());
        assert!("k=1,2,3,4;f=0,0,0,4".parse::<StateKey>().is_err());
    }
}
