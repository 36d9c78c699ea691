use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::corpus::FrameCorpus;
use super::delta::DeltaTable;
use super::render::render_to_time;
use super::table::VcTable;
use super::time::TimeOfDay;
use super::VcamError;
use crate::metrics::{extract_features, FeatureTuple};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VcErrorReport {
    /// Mean relative error per feature, in knob order.
    pub mean: [f64; 4],
    pub std: [f64; 4],
    /// Average of the four per-feature means.
    pub overall: f64,
    pub pairs: usize,
}

/// Renders frames of every interval to every other interval and compares
/// the mean rendered features with the mean features of the real frames of
/// the target interval. At most `frames_per_source` frames are rendered per
/// source interval.
pub fn vc_error(
    corpus: &FrameCorpus,
    vc: &VcTable,
    dt: &DeltaTable,
    frames_per_source: usize,
) -> Result<VcErrorReport, VcamError> {
    let groups = corpus.intervals();
    let mut truth: BTreeMap<usize, FeatureTuple> = BTreeMap::new();
    let mut sources: BTreeMap<usize, Vec<_>> = BTreeMap::new();
    for (&interval, idxs) in &groups {
        let mut feats = Vec::with_capacity(idxs.len());
        for (n, &i) in idxs.iter().enumerate() {
            let img = corpus.load(&corpus.frames()[i])?;
            feats.push(extract_features(&img));
            if n < frames_per_source {
                sources.entry(interval).or_default().push(img);
            }
        }
        truth.insert(interval, FeatureTuple::mean(&feats).ok_or(VcamError::EmptyCorpus)?);
    }
    let pairs: Vec<(usize, usize)> = groups
        .keys()
        .flat_map(|&i| groups.keys().filter(move |&&j| j != i).map(move |&j| (i, j)))
        .collect();
    if pairs.is_empty() {
        return Err(VcamError::EmptyCorpus);
    }

    let errors: Vec<[f64; 4]> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let t1 = TimeOfDay::interval_start(i)?;
            let t2 = TimeOfDay::interval_start(j)?;
            let rendered = sources[&i]
                .iter()
                .map(|img| Ok(extract_features(&render_to_time(img, t1, t2, vc, dt)?.image)))
                .collect::<Result<Vec<_>, VcamError>>()?;
            let got = FeatureTuple::mean(&rendered).ok_or(VcamError::EmptyCorpus)?.to_array();
            let want = truth[&j].to_array();
            Ok(std::array::from_fn(|k| (got[k] - want[k]).abs() / want[k].max(1e-9)))
        })
        .collect::<Result<_, VcamError>>()?;

    let n = errors.len() as f64;
    let mean: [f64; 4] = std::array::from_fn(|k| errors.iter().map(|e| e[k]).sum::<f64>() / n);
    let std = std::array::from_fn(|k| (errors.iter().map(|e| (e[k] - mean[k]).powi(2)).sum::<f64>() / n).sqrt());
    Ok(VcErrorReport {
        mean,
        std,
        overall: mean.iter().sum::<f64>() / 4.0,
        pairs: errors.len(),
    })
}
