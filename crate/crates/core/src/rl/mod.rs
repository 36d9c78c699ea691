//! Tabular SARSA tuner over the virtual knobs.

mod action;
mod agent;
mod episode;
mod lattice;
mod policy;
mod qtable;
mod state;
mod toy;

use thiserror::Error;

pub use action::Action;
pub use agent::{choose_action, q_update, AgentConfig};
pub use episode::{run_episode, write_trace, Episode, StepRecord, TunableEnv, TRACE_HEADER};
pub use lattice::{KnobLattice, Levels};
pub use policy::{RevertGreedyPolicy, NoOpPolicy, Policy, PolicyFactory, PolicyRegistry};
pub use qtable::QTable;
pub use state::{FeatureBinner, StateKey, FEATURE_BINS};
pub use toy::ToyEnv;

#[derive(Debug, Error)]
pub enum RlError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("environment: {0}")]
    Env(String),
    #[error(transparent)]
    Imaging(#[from] crate::imaging::ImagingError),
    #[error(transparent)]
    Estimator(#[from] crate::estimator::EstimatorError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
