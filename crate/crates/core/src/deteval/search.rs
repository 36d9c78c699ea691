use std::cmp::Ordering;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, BoundingBox, DetEvalError, Detector, EvalResult, DEFAULT_IOU_THRESHOLD};
use crate::imaging::{apply_config, ImageBuffer, KnobConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankedConfig {
    pub config: KnobConfig,
    pub result: EvalResult,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: RankedConfig,
    /// Every config that evaluated successfully, best first.
    pub ranking: Vec<RankedConfig>,
    pub failed: usize,
}

/// Ranking order: mAP descending, then mean TP IoU descending, then the
/// config itself in lexicographic order.
pub fn rank_cmp(a: &RankedConfig, b: &RankedConfig) -> Ordering {
    b.result
        .map
        .total_cmp(&a.result.map)
        .then(b.result.mean_tp_iou.total_cmp(&a.result.mean_tp_iou))
        .then(a.config.lex_cmp(&b.config))
}

/// Renders `img` under every config, scores the detector output against
/// `gt` and returns the top-ranked config with the full ranking.
pub fn find_best_config(
    img: &ImageBuffer,
    gt: &[BoundingBox],
    detector: &dyn Detector,
    configs: &[KnobConfig],
) -> Result<SearchOutcome, DetEvalError> {
    if configs.is_empty() {
        return Err(DetEvalError::NoConfigs);
    }
    let results: Vec<Result<RankedConfig, DetEvalError>> = configs
        .par_iter()
        .map(|cfg| {
            let aug = apply_config(img, cfg)?;
            let dets = detector.detect(&aug)?;
            Ok(RankedConfig {
                config: *cfg,
                result: evaluate(&dets, gt, DEFAULT_IOU_THRESHOLD),
            })
        })
        .collect();

    let mut ranking = Vec::with_capacity(results.len());
    let mut failed = 0;
    for (cfg, r) in configs.iter().zip(results) {
        match r {
            Ok(rc) => ranking.push(rc),
            Err(e) => {
                warn!("config {cfg} excluded: {e}");
                failed += 1;
            }
        }
    }
    ranking.sort_by(rank_cmp);
    let best = *ranking.first().ok_or(DetEvalError::AllConfigsFailed)?;
    Ok(SearchOutcome { best, ranking, failed })
}
