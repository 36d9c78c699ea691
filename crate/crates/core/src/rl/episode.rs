use std::io::Write;

use log::warn;
use rand_chacha::ChaCha8Rng;

use super::{q_update, Action, AgentConfig, FeatureBinner, KnobLattice, Levels, Policy, QTable, RlError, StateKey};
use crate::estimator::QualityEstimator;
use crate::imaging::ImageBuffer;
use crate::metrics::extract_features;

/// A camera pipeline the agent can steer.
pub trait TunableEnv {
    fn lattice(&self) -> &KnobLattice;
    fn levels(&self) -> Levels;
    fn set_levels(&mut self, levels: Levels) -> Result<(), RlError>;
    /// Next frame under the current knob levels, `None` once exhausted.
    fn next_frame(&mut self) -> Result<Option<ImageBuffer>, RlError>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub state: StateKey,
    pub action: Action,
    pub reward: f64,
    /// `Q(s,a)` after the update.
    pub q_value: f64,
    pub q_delta: f64,
    /// `None` when the estimator failed on this step's frame.
    pub quality: Option<f64>,
    pub quality_prev: Option<f64>,
    pub levels: Levels,
}

impl StepRecord {
    pub fn estimator_failed(&self) -> bool {
        self.quality.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Episode {
    pub steps: Vec<StepRecord>,
    /// Quality of the frame observed before the first action.
    pub initial_quality: Option<f64>,
}

impl Episode {
    pub fn qualities(&self) -> impl Iterator<Item = f64> + '_ {
        self.initial_quality.into_iter().chain(self.steps.iter().filter_map(|s| s.quality))
    }
}

/// Runs up to `steps` SARSA steps. Each step performs the pending action,
/// pulls one frame, scores it, observes the next state, picks the next
/// action and updates `Q(s,a)`.
///
/// The reward is the change from the last successful estimate. A step whose
/// estimate fails gets reward 0 and keeps the previous estimate as the
/// baseline for the next step. The episode ends early when the environment
/// runs out of frames.
#[allow(clippy::too_many_arguments)]
pub fn run_episode(
    env: &mut dyn TunableEnv,
    estimator: &mut dyn QualityEstimator,
    policy: &mut dyn Policy,
    q: &mut QTable,
    binner: &FeatureBinner,
    cfg: &AgentConfig,
    rng: &mut ChaCha8Rng,
    steps: usize,
) -> Result<Episode, RlError> {
    cfg.validate()?;
    let Some(first) = env.next_frame()? else {
        return Ok(Episode::default());
    };
    let mut quality = score(estimator, &first);
    let initial_quality = quality;
    let mut s = StateKey::new(env.levels(), binner, &extract_features(&first));
    let mut a = policy.choose(q, &s, Action::NoOp, 0.0, cfg, rng);
    let mut records = Vec::with_capacity(steps);

    for step in 0..steps {
        let levels = env.lattice().apply(&env.levels(), a);
        env.set_levels(levels)?;
        let Some(frame) = env.next_frame()? else {
            break;
        };
        let now = score(estimator, &frame);
        let reward = match (now, quality) {
            (Some(n), Some(p)) => n - p,
            _ => 0.0,
        };
        let s_next = StateKey::new(levels, binner, &extract_features(&frame));
        let a_next = policy.choose(q, &s_next, a, reward, cfg, rng);
        let before = q.get(&s, a);
        let q_value = q_update(q, s, a, reward, &s_next, a_next, cfg)?;
        records.push(StepRecord {
            step,
            state: s,
            action: a,
            reward,
            q_value,
            q_delta: q_value - before,
            quality: now,
            quality_prev: quality,
            levels,
        });
        if now.is_some() {
            quality = now;
        }
        s = s_next;
        a = a_next;
    }
    Ok(Episode {
        steps: records,
        initial_quality,
    })
}

fn score(estimator: &mut dyn QualityEstimator, img: &ImageBuffer) -> Option<f64> {
    match estimator.estimate(img) {
        Ok(e) => Some(e.value),
        Err(e) => {
            warn!("estimator `{}` failed: {e}", estimator.name());
            None
        }
    }
}

pub const TRACE_HEADER: [&str; 9] = [
    "step",
    "state",
    "action",
    "reward",
    "q_value",
    "q_delta",
    "quality",
    "quality_prev",
    "estimator_failed",
];

/// Writes a trace as CSV with [`TRACE_HEADER`] columns. Missing estimates
/// are empty cells.
pub fn write_trace<W: Write>(out: W, steps: &[StepRecord]) -> Result<(), RlError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in steps {
        w.write_record([
            r.step.to_string(),
            r.state.to_string(),
            r.action.to_string(),
            r.reward.to_string(),
            r.q_value.to_string(),
            r.q_delta.to_string(),
            opt(r.quality),
            opt(r.quality_prev),
            r.estimator_failed().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
