use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;

use super::{choose_action, Action, AgentConfig, QTable, RlError, StateKey};

pub trait Policy: Send {
    fn name(&self) -> &str;
    fn choose(
        &mut self,
        q: &QTable,
        s: &StateKey,
        a_prev: Action,
        r_prev: f64,
        cfg: &AgentConfig,
        rng: &mut ChaCha8Rng,
    ) -> Action;
}

/// The revert/repeat/greedy rule of [`choose_action`].
pub struct RevertGreedyPolicy;

impl Policy for RevertGreedyPolicy {
    fn name(&self) -> &str {
        "revert-greedy"
    }

    fn choose(
        &mut self,
        q: &QTable,
        s: &StateKey,
        a_prev: Action,
        r_prev: f64,
        cfg: &AgentConfig,
        rng: &mut ChaCha8Rng,
    ) -> Action {
        choose_action(q, s, a_prev, r_prev, cfg, rng)
    }
}

/// Never touches the knobs. Used for A/A runs.
pub struct NoOpPolicy;

impl Policy for NoOpPolicy {
    fn name(&self) -> &str {
        "noop"
    }

    fn choose(&mut self, _: &QTable, _: &StateKey, _: Action, _: f64, _: &AgentConfig, _: &mut ChaCha8Rng) -> Action {
        Action::NoOp
    }
}

pub type PolicyFactory = Box<dyn Fn() -> Box<dyn Policy> + Send + Sync>;

pub struct PolicyRegistry {
    factories: BTreeMap<String, PolicyFactory>,
}

impl PolicyRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// `revert-greedy` and `noop`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("revert-greedy", || Box::new(RevertGreedyPolicy));
        r.register("noop", || Box::new(NoOpPolicy));
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn() -> Box<dyn Policy> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn Policy>, RlError> {
        self.factories
            .get(name)
            .map(|f| f())
            .ok_or_else(|| RlError::Config(format!("unknown policy `{name}`")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
