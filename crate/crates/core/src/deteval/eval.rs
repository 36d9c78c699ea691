//! mAP at a single IoU threshold with all-point interpolated AP.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{iou, BoundingBox};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Mean AP over classes present in the ground truth, in [0, 100].
    pub map: f64,
    /// Mean IoU of matched pairs; 0 when `tp == 0`.
    pub mean_tp_iou: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Detections and ground truth for one frame.
#[derive(Clone, Copy, Debug)]
pub struct FrameEval<'a> {
    pub dets: &'a [BoundingBox],
    pub gt: &'a [BoundingBox],
}

/// Scores one frame. Greedy matching in descending score order; every
/// ground-truth box is matched at most once.
pub fn evaluate(dets: &[BoundingBox], gt: &[BoundingBox], iou_threshold: f64) -> EvalResult {
    evaluate_frames(&[FrameEval { dets, gt }], iou_threshold)
}

struct Candidate {
    frame: usize,
    index: usize,
    score: f64,
    best_iou: f64,
}

/// Area under the precision/recall curve after making precision
/// monotonically non-increasing from the right.
pub fn all_point_ap(recall: &[f64], precision: &[f64]) -> f64 {
    let mut envelope = precision.to_vec();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (r, p) in recall.iter().zip(&envelope) {
        if *r > prev_recall {
            ap += (r - prev_recall) * p;
            prev_recall = *r;
        }
    }
    ap
}

/// Scores a set of frames jointly: matching happens per frame, the
/// precision/recall curve is accumulated across all of them.
pub fn evaluate_frames(frames: &[FrameEval<'_>], iou_threshold: f64) -> EvalResult {
    let classes: BTreeSet<u32> = frames
        .iter()
        .flat_map(|f| f.gt.iter().chain(f.dets.iter()).map(|b| b.class_id))
        .collect();

    let mut ap_sum = 0.0;
    let mut ap_classes = 0usize;
    let mut tp_total = 0usize;
    let mut fp_total = 0usize;
    let mut gt_total = 0usize;
    let mut iou_sum = 0.0;

    for class in classes {
        let n_gt: usize = frames
            .iter()
            .map(|f| f.gt.iter().filter(|g| g.class_id == class).count())
            .sum();
        gt_total += n_gt;

        let mut cands: Vec<Candidate> = Vec::new();
        for (fi, f) in frames.iter().enumerate() {
            for (di, d) in f.dets.iter().enumerate().filter(|(_, d)| d.class_id == class) {
                let best_iou = f
                    .gt
                    .iter()
                    .filter(|g| g.class_id == class)
                    .map(|g| iou(d, g))
                    .fold(0.0, f64::max);
                cands.push(Candidate {
                    frame: fi,
                    index: di,
                    score: d.score.unwrap_or(1.0),
                    best_iou,
                });
            }
        }
        // Score desc, then larger IoU, then input order.
        cands.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then(b.best_iou.total_cmp(&a.best_iou))
                .then(a.frame.cmp(&b.frame))
                .then(a.index.cmp(&b.index))
        });

        let mut matched: Vec<Vec<bool>> = frames.iter().map(|f| vec![false; f.gt.len()]).collect();
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut recall = Vec::with_capacity(cands.len());
        let mut precision = Vec::with_capacity(cands.len());
        for c in &cands {
            let f = &frames[c.frame];
            let det = &f.dets[c.index];
            let mut best: Option<(usize, f64)> = None;
            for (gi, g) in f.gt.iter().enumerate() {
                if g.class_id != class || matched[c.frame][gi] {
                    continue;
                }
                let v = iou(det, g);
                if v >= iou_threshold && best.is_none_or(|(_, bv)| v.partial_cmp(&bv) == Some(Ordering::Greater)) {
                    best = Some((gi, v));
                }
            }
            match best {
                Some((gi, v)) => {
                    matched[c.frame][gi] = true;
                    tp += 1;
                    iou_sum += v;
                }
                None => fp += 1,
            }
            if n_gt > 0 {
                recall.push(tp as f64 / n_gt as f64);
                precision.push(tp as f64 / (tp + fp) as f64);
            }
        }
        tp_total += tp;
        fp_total += fp;
        if n_gt > 0 {
            ap_sum += all_point_ap(&recall, &precision);
            ap_classes += 1;
        }
    }

    EvalResult {
        map: if ap_classes == 0 {
            0.0
        } else {
            100.0 * ap_sum / ap_classes as f64
        },
        mean_tp_iou: if tp_total == 0 { 0.0 } else { iou_sum / tp_total as f64 },
        tp: tp_total,
        fp: fp_total,
        fn_: gt_total - tp_total,
    }
}
