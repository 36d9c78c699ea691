//! Side-by-side evaluation of a fixed-knob pipeline and the SARSA tuner
//! over a simulated day.

mod ab;
mod report;

use thiserror::Error;

pub use ab::{ab_evaluate, tune_day, AbConfig, AbReport, IntervalReport, TuneRun};
pub use report::{improvement_cdf, write_cdf, write_intervals, write_report, CDF_HEADER, INTERVALS_HEADER};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("frame `{0}` has no ground truth")]
    MissingGroundTruth(String),
    #[error(transparent)]
    Vcam(#[from] crate::vcam::VcamError),
    #[error(transparent)]
    Rl(#[from] crate::rl::RlError),
    #[error(transparent)]
    DetEval(#[from] crate::deteval::DetEvalError),
    #[error(transparent)]
    Imaging(#[from] crate::imaging::ImagingError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
