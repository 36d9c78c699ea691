//! The virtual camera: per-interval feature profiles, the delta-to-config
//! table, and re-rendering a frame as if captured at another time of day.

mod corpus;
mod delta;
mod error_eval;
mod render;
mod table;
mod time;

pub use corpus::{frame_id, CorpusFrame, FrameCorpus, GT_FILE, SCENE_FILE};
pub use delta::{linear_grid, median, DeltaTable, KnobGrids, DEFAULT_DELTA_STEP, RATIO_EPS};
pub use error_eval::{vc_error, VcErrorReport};
pub use render::{choose_config, render_to_time, TileMatch, VcRender};
pub use table::{tile_features, BuildStats, VcSlot, VcTable};
pub use time::{
    frame_file_name, parse_frame_file_name, TimeOfDay, INTERVALS_PER_DAY, INTERVAL_SECONDS, SECONDS_PER_DAY,
};

use thiserror::Error;

use crate::deteval::DetEvalError;
use crate::imaging::ImagingError;
use crate::metrics::MetricsError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum VcamError {
    #[error("bad time of day `{0}`")]
    Time(String),
    #[error("interval {0} has no profile")]
    MissingInterval(usize),
    #[error("corpus has no frames")]
    EmptyCorpus,
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Annotations(#[from] DetEvalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
