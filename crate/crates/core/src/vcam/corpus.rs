use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::warn;
use serde::Deserialize;

use super::time::{frame_file_name, parse_frame_file_name, TimeOfDay};
use super::VcamError;
use crate::deteval::{read_jsonl, write_jsonl, BoundingBox};
use crate::imaging::{read_image, write_image, ImageBuffer};
use crate::metrics::FeatureTuple;
use crate::scene::SceneTag;

pub const GT_FILE: &str = "gt.jsonl";
pub const SCENE_FILE: &str = "scene.json";

#[derive(Clone, Debug)]
enum FrameSource {
    Memory(ImageBuffer),
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct CorpusFrame {
    pub frame_id: String,
    pub time: TimeOfDay,
    pub seq: u32,
    source: FrameSource,
}

impl CorpusFrame {
    pub fn interval(&self) -> usize {
        self.time.interval()
    }
}

#[derive(Deserialize)]
struct SceneReference {
    reference: Option<FeatureTuple>,
}

/// Timestamped frames grouped into 15-minute intervals, plus optional
/// ground truth and the scene's reference features.
///
/// Frames loaded through [`FrameCorpus::load`] carry a [`SceneTag`] when
/// either annotation source is available.
#[derive(Clone, Debug, Default)]
pub struct FrameCorpus {
    frames: Vec<CorpusFrame>,
    gt: BTreeMap<String, Vec<BoundingBox>>,
    reference: Option<FeatureTuple>,
}

impl FrameCorpus {
    pub fn from_frames(frames: impl IntoIterator<Item = (TimeOfDay, u32, ImageBuffer)>) -> Self {
        let mut c = Self::default();
        for (time, seq, img) in frames {
            c.frames.push(CorpusFrame {
                frame_id: frame_id(time, seq),
                time,
                seq,
                source: FrameSource::Memory(img),
            });
        }
        c.sort();
        c
    }

    /// Scans `dir` for `frame_<HHMMSS>_<seq>.{png,ppm}` files. `gt.jsonl` and
    /// `scene.json` are picked up when present.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, VcamError> {
        let dir = dir.as_ref();
        let mut c = Self::default();
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            let is_image = name.ends_with(".png") || name.ends_with(".ppm");
            match parse_frame_file_name(name) {
                Some((time, seq)) if is_image => c.frames.push(CorpusFrame {
                    frame_id: frame_id(time, seq),
                    time,
                    seq,
                    source: FrameSource::File(path.clone()),
                }),
                _ if is_image => warn!("ignoring {name}: not a frame_<HHMMSS>_<seq> file"),
                _ => {}
            }
        }
        let gt_path = dir.join(GT_FILE);
        if gt_path.exists() {
            c.gt = read_jsonl(BufReader::new(fs::File::open(gt_path)?))?;
        }
        let scene_path = dir.join(SCENE_FILE);
        if scene_path.exists() {
            let s: SceneReference = serde_json::from_reader(BufReader::new(fs::File::open(&scene_path)?))
                .map_err(|e| VcamError::Format(format!("{}: {e}", scene_path.display())))?;
            c.reference = s.reference;
        }
        c.sort();
        Ok(c)
    }

    fn sort(&mut self) {
        self.frames.sort_by_key(|f| (f.time, f.seq));
    }

    pub fn with_ground_truth(mut self, gt: BTreeMap<String, Vec<BoundingBox>>) -> Self {
        self.gt = gt;
        self
    }

    pub fn with_reference(mut self, reference: Option<FeatureTuple>) -> Self {
        self.reference = reference;
        self
    }

    pub fn frames(&self) -> &[CorpusFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn ground_truth(&self) -> &BTreeMap<String, Vec<BoundingBox>> {
        &self.gt
    }

    pub fn reference(&self) -> Option<&FeatureTuple> {
        self.reference.as_ref()
    }

    /// Frame indices grouped by interval, intervals ascending.
    pub fn intervals(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, f) in self.frames.iter().enumerate() {
            out.entry(f.interval()).or_default().push(i);
        }
        out
    }

    pub fn frames_in(&self, interval: usize) -> impl Iterator<Item = &CorpusFrame> {
        self.frames.iter().filter(move |f| f.interval() == interval)
    }

    fn tag_for(&self, frame_id: &str) -> Option<Arc<SceneTag>> {
        let gt = self.gt.get(frame_id);
        if gt.is_none() && self.reference.is_none() {
            return None;
        }
        Some(Arc::new(SceneTag {
            frame_id: frame_id.to_string(),
            gt: gt.cloned().unwrap_or_default(),
            reference: self.reference,
        }))
    }

    pub fn load(&self, frame: &CorpusFrame) -> Result<ImageBuffer, VcamError> {
        let img = match &frame.source {
            FrameSource::Memory(img) => img.clone(),
            FrameSource::File(p) => read_image(p)?,
        };
        let tag = img.tag().cloned().or_else(|| self.tag_for(&frame.frame_id));
        Ok(img.with_tag(tag))
    }

    /// Writes every frame as PNG plus `gt.jsonl` when ground truth is known.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<(), VcamError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut gt_lines: Vec<(String, Vec<BoundingBox>)> = Vec::new();
        for f in &self.frames {
            let img = self.load(f)?;
            write_image(&img, dir.join(frame_file_name(f.time, f.seq, "png")))?;
            if let Some(tag) = img.tag() {
                gt_lines.push((f.frame_id.clone(), tag.gt.clone()));
            }
        }
        if !gt_lines.is_empty() {
            let file = fs::File::create(dir.join(GT_FILE))?;
            write_jsonl(
                std::io::BufWriter::new(file),
                gt_lines.iter().map(|(id, b)| (id.as_str(), b.as_slice())),
            )?;
        }
        Ok(())
    }
}

pub fn frame_id(time: TimeOfDay, seq: u32) -> String {
    let name = frame_file_name(time, seq, "png");
    name.trim_end_matches(".png").to_string()
}
