//! Detection scoring (mAP at IoU 0.5 plus mean true-positive IoU) and the
//! exhaustive best-configuration search.

mod bbox;
mod eval;
mod search;
mod synthetic;

pub use bbox::{iou, read_jsonl, write_jsonl, BoundingBox, FrameBoxes};
pub use eval::{all_point_ap, evaluate, evaluate_frames, EvalResult, FrameEval, DEFAULT_IOU_THRESHOLD};
pub use search::{find_best_config, rank_cmp, RankedConfig, SearchOutcome};
pub use synthetic::{Detector, QualityResponse, SyntheticDetector};

use thiserror::Error;

use crate::imaging::ImagingError;

#[derive(Debug, Error)]
pub enum DetEvalError {
    #[error("invalid bounding box {0:?}")]
    InvalidBox(BoundingBox),
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("frame carries no scene descriptor")]
    MissingTag,
    #[error("config list is empty")]
    NoConfigs,
    #[error("every config failed to evaluate")]
    AllConfigsFailed,
    #[error("invalid quality response: {0}")]
    Response(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
