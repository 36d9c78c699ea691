use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::FrameCorpus;
use super::time::{INTERVALS_PER_DAY, INTERVAL_SECONDS};
use super::{VcamError, SCHEMA_VERSION};
use crate::imaging::ImageBuffer;
use crate::metrics::{extract_features, split_tiles, FeatureTuple, TILE_COUNT};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VcSlot {
    /// Frames averaged into this slot.
    pub frames: usize,
    pub tiles: Vec<FeatureTuple>,
}

/// Mean per-tile features for each 15-minute interval of the day.
/// Intervals without frames are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VcTable {
    pub schema_version: u32,
    pub interval_seconds: u32,
    pub slots: Vec<Option<VcSlot>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub frames_used: usize,
    pub frames_skipped: usize,
}

pub fn tile_features(img: &ImageBuffer) -> Result<Vec<FeatureTuple>, VcamError> {
    Ok(split_tiles(img)?.iter().map(extract_features).collect())
}

impl VcTable {
    pub fn empty() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            interval_seconds: INTERVAL_SECONDS,
            slots: vec![None; INTERVALS_PER_DAY],
        }
    }

    /// Averages per-tile features over every frame of each interval.
    /// Unreadable frames are skipped and counted.
    pub fn build(corpus: &FrameCorpus) -> Result<(Self, BuildStats), VcamError> {
        let groups: Vec<(usize, Vec<usize>)> = corpus.intervals().into_iter().collect();
        let per_interval: Vec<(usize, Option<VcSlot>, BuildStats)> = groups
            .par_iter()
            .map(|(interval, idxs)| {
                let mut stats = BuildStats::default();
                let mut sums = vec![[0.0; 4]; TILE_COUNT];
                for &i in idxs {
                    let frame = &corpus.frames()[i];
                    let tiles = corpus.load(frame).and_then(|img| tile_features(&img));
                    match tiles {
                        Ok(tiles) => {
                            for (acc, t) in sums.iter_mut().zip(&tiles) {
                                for (a, v) in acc.iter_mut().zip(t.to_array()) {
                                    *a += v;
                                }
                            }
                            stats.frames_used += 1;
                        }
                        Err(e) => {
                            warn!("skipping {}: {e}", frame.frame_id);
                            stats.frames_skipped += 1;
                        }
                    }
                }
                let n = stats.frames_used;
                let slot = (n > 0).then(|| VcSlot {
                    frames: n,
                    tiles: sums
                        .iter()
                        .map(|s| FeatureTuple::from_array(s.map(|v| v / n as f64)))
                        .collect(),
                });
                (*interval, slot, stats)
            })
            .collect();

        let mut table = Self::empty();
        let mut total = BuildStats::default();
        for (interval, slot, stats) in per_interval {
            table.slots[interval] = slot;
            total.frames_used += stats.frames_used;
            total.frames_skipped += stats.frames_skipped;
        }
        Ok((table, total))
    }

    pub fn slot(&self, interval: usize) -> Result<&VcSlot, VcamError> {
        self.slots
            .get(interval)
            .and_then(Option::as_ref)
            .ok_or(VcamError::MissingInterval(interval))
    }

    pub fn present(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(i, _)| i)
    }

    pub fn validate(&self) -> Result<(), VcamError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(VcamError::Format(format!(
                "schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.slots.len() != INTERVALS_PER_DAY || self.interval_seconds != INTERVAL_SECONDS {
            return Err(VcamError::Format("table must have 96 slots of 900 s".into()));
        }
        for slot in self.slots.iter().flatten() {
            if slot.tiles.len() != TILE_COUNT || !slot.tiles.iter().all(FeatureTuple::is_valid) {
                return Err(VcamError::Format("slot must hold 12 valid feature tuples".into()));
            }
        }
        Ok(())
    }
}
