use serde::{Deserialize, Serialize};

use super::{Action, RlError};
use crate::imaging::{Knob, KnobConfig};

pub type Levels = [i32; 4];

/// Discrete knob positions. Level `k` of a knob maps to
/// `clamp(1 + k·step, lo, hi)` within its camera range; inactive knobs are
/// pinned at level 0 (factor 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnobLattice {
    pub active: [bool; 4],
    pub step: [f64; 4],
    min: Levels,
    max: Levels,
}

impl KnobLattice {
    /// Steps of one tenth of each knob's camera range.
    pub fn new(active: [bool; 4]) -> Self {
        Self::with_steps(active, Knob::ALL.map(|k| k.camera_range().span() / 10.0)).expect("default steps are positive")
    }

    pub fn all() -> Self {
        Self::new([true; 4])
    }

    pub fn only(knob: Knob) -> Self {
        let mut active = [false; 4];
        active[knob.index()] = true;
        Self::new(active)
    }

    pub fn with_steps(active: [bool; 4], step: [f64; 4]) -> Result<Self, RlError> {
        if step.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(RlError::Config("knob steps must be positive".into()));
        }
        let mut min = [0; 4];
        let mut max = [0; 4];
        for k in Knob::ALL {
            let i = k.index();
            if active[i] {
                let r = k.camera_range();
                min[i] = -(((1.0 - r.lo) / step[i] - 1e-9).ceil() as i32);
                max[i] = ((r.hi - 1.0) / step[i] - 1e-9).ceil() as i32;
            }
        }
        Ok(Self { active, step, min, max })
    }

    pub fn bounds(&self, knob: Knob) -> (i32, i32) {
        (self.min[knob.index()], self.max[knob.index()])
    }

    pub fn factor(&self, knob: Knob, level: i32) -> f64 {
        let i = knob.index();
        if !self.active[i] {
            return 1.0;
        }
        knob.camera_range().clamp(1.0 + level as f64 * self.step[i])
    }

    pub fn config(&self, levels: &Levels) -> KnobConfig {
        KnobConfig::from_array(Knob::ALL.map(|k| self.factor(k, levels[k.index()])))
    }

    /// Result of `action`; moves past a bound or on an inactive knob leave
    /// the levels unchanged.
    pub fn apply(&self, levels: &Levels, action: Action) -> Levels {
        let mut out = *levels;
        let (knob, delta) = match action {
            Action::NoOp => return out,
            Action::Increase(k) => (k, 1),
            Action::Decrease(k) => (k, -1),
        };
        let i = knob.index();
        if self.active[i] {
            out[i] = (out[i] + delta).clamp(self.min[i], self.max[i]);
        }
        out
    }

    /// Level whose factor is closest to `factor`.
    pub fn level_for(&self, knob: Knob, factor: f64) -> i32 {
        let (lo, hi) = self.bounds(knob);
        (lo..=hi)
            .min_by(|&a, &b| {
                (self.factor(knob, a) - factor)
                    .abs()
                    .total_cmp(&(self.factor(knob, b) - factor).abs())
            })
            .unwrap_or(0)
    }
}
