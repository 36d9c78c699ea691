use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::{Action, QTable, RlError, StateKey};

/// Learning parameters.
///
/// **`epsilon` is inverted relative to the usual ε-greedy convention:** a
/// uniform draw *at or above* `epsilon` triggers a random action, so
/// `epsilon = 1` never explores and `epsilon = 0` always does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            gamma: 0.9,
            epsilon: 0.9,
            seed: 0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), RlError> {
        for (name, v) in [("alpha", self.alpha), ("gamma", self.gamma), ("epsilon", self.epsilon)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(RlError::Config(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// SARSA update `Q(s,a) ← Q(s,a) + α[r + γ·Q(s',a') − Q(s,a)]`; returns the
/// new `Q(s,a)`.
pub fn q_update(
    q: &mut QTable,
    s: StateKey,
    a: Action,
    r: f64,
    s_next: &StateKey,
    a_next: Action,
    cfg: &AgentConfig,
) -> Result<f64, RlError> {
    if !r.is_finite() {
        return Err(RlError::NonFinite(r));
    }
    let old = q.get(&s, a);
    let new = old + cfg.alpha * (r + cfg.gamma * q.get(s_next, a_next) - old);
    q.set(s, a, new)?;
    Ok(new)
}

/// Action choice:
/// 1. a uniform draw `>= epsilon` picks a uniformly random action;
/// 2. otherwise a negative previous reward reverts the previous action;
/// 3. otherwise the previous action is repeated when its reward beats the
///    value of the greedy action, else the greedy action is taken.
pub fn choose_action<R: RngExt + ?Sized>(
    q: &QTable,
    s: &StateKey,
    a_prev: Action,
    r_prev: f64,
    cfg: &AgentConfig,
    rng: &mut R,
) -> Action {
    if rng.random::<f64>() >= cfg.epsilon {
        return Action::ALL[rng.random_range(0..Action::ALL.len())];
    }
    if r_prev < 0.0 {
        return a_prev.revert();
    }
    let greedy = q.argmax(s);
    if r_prev > q.get(s, greedy) {
        a_prev
    } else {
        greedy
    }
}
