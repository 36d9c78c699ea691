//! Synthetic day-cycle scenes with embedded ground truth.
//!
//! A static base pattern is re-rendered for every interval with a knob
//! config solved so that its measured features hit the day profile, then
//! per-frame sensor noise is added.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deteval::BoundingBox;
use crate::imaging::{apply_config, ImageBuffer, ImagingError, KnobConfig};
use crate::metrics::{extract_features, FeatureTuple};
use crate::vcam::{frame_id, FrameCorpus, TimeOfDay, VcamError, INTERVALS_PER_DAY, INTERVAL_SECONDS, SCENE_FILE};

/// Ground truth riding along with a synthetic frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneTag {
    pub frame_id: String,
    pub gt: Vec<BoundingBox>,
    /// Features of the scene under ideal (midday) conditions.
    pub reference: Option<FeatureTuple>,
}

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid scene spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Vcam(#[from] VcamError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pattern {
    Gradient,
    Checker { cell: usize },
    /// Textured background with `objects` striped rectangles, each one a
    /// ground-truth box.
    Shapes { objects: usize },
}

/// Per-interval multipliers of the reference features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DayProfile {
    Flat,
    /// `night` at night, rising along a half sine between 06:00 and 18:00
    /// to 1 at noon.
    Diurnal { night: [f64; 4] },
    Custom { multipliers: Vec<[f64; 4]> },
}

impl DayProfile {
    pub const DEFAULT_NIGHT: [f64; 4] = [0.65, 0.75, 0.6, 0.8];

    pub fn daylight(interval: usize) -> f64 {
        let hour = (interval as f64 + 0.5) * INTERVAL_SECONDS as f64 / 3600.0;
        if (6.0..=18.0).contains(&hour) {
            (std::f64::consts::PI * (hour - 6.0) / 12.0).sin()
        } else {
            0.0
        }
    }

    pub fn multipliers(&self, interval: usize) -> [f64; 4] {
        match self {
            Self::Flat => [1.0; 4],
            Self::Diurnal { night } => {
                let d = Self::daylight(interval);
                night.map(|n| n + (1.0 - n) * d)
            }
            Self::Custom { multipliers } => multipliers[interval],
        }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let ok = |m: &[f64; 4]| m.iter().all(|v| v.is_finite() && *v > 0.0);
        match self {
            Self::Flat => Ok(()),
            Self::Diurnal { night } if ok(night) => Ok(()),
            Self::Custom { multipliers } if multipliers.len() == INTERVALS_PER_DAY && multipliers.iter().all(ok) => {
                Ok(())
            }
            _ => Err(SceneError::Spec("profile values must be finite and positive, 96 rows".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub pattern: Pattern,
    pub profile: DayProfile,
    /// Standard deviation of per-channel Gaussian noise, in gray levels.
    pub noise_sigma: f64,
    pub frames_per_interval: usize,
    pub intervals: Vec<usize>,
    pub seed: u64,
}

impl SceneSpec {
    /// 12 intervals two hours apart, 20 frames each.
    pub fn tiny() -> Self {
        Self {
            width: 128,
            height: 96,
            pattern: Pattern::Shapes { objects: 6 },
            profile: DayProfile::Diurnal {
                night: DayProfile::DEFAULT_NIGHT,
            },
            noise_sigma: 1.0,
            frames_per_interval: 20,
            intervals: (0..INTERVALS_PER_DAY).step_by(8).collect(),
            seed: 7,
        }
    }

    /// Every interval of the day.
    pub fn full_day(frames_per_interval: usize) -> Self {
        Self {
            frames_per_interval,
            intervals: (0..INTERVALS_PER_DAY).collect(),
            ..Self::tiny()
        }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.width < 16 || self.height < 16 {
            return Err(SceneError::Spec("frames must be at least 16x16".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(SceneError::Spec("noise_sigma must be >= 0".into()));
        }
        if self.frames_per_interval == 0 || self.intervals.is_empty() {
            return Err(SceneError::Spec("need at least one interval and one frame".into()));
        }
        if self.intervals.iter().any(|&i| i >= INTERVALS_PER_DAY) {
            return Err(SceneError::Spec("interval index must be < 96".into()));
        }
        if self.frames_per_interval as u32 > INTERVAL_SECONDS {
            return Err(SceneError::Spec("at most one frame per second".into()));
        }
        if let Pattern::Checker { cell: 0 } = self.pattern {
            return Err(SceneError::Spec("checker cell must be >= 1".into()));
        }
        self.profile.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub interval: usize,
    pub multipliers: [f64; 4],
    pub config: KnobConfig,
    /// Features of the noiseless-seed rendering the solver converged to.
    pub achieved: FeatureTuple,
}

/// Contents of `scene.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    pub spec: SceneSpec,
    pub reference: FeatureTuple,
    pub gt: Vec<BoundingBox>,
    pub intervals: Vec<IntervalRecord>,
}

pub struct GeneratedScene {
    pub corpus: FrameCorpus,
    pub manifest: SceneManifest,
}

const PALETTE: [[f64; 3]; 6] = [
    [200.0, 40.0, 40.0],
    [40.0, 160.0, 60.0],
    [50.0, 70.0, 200.0],
    [210.0, 180.0, 40.0],
    [170.0, 50.0, 170.0],
    [40.0, 170.0, 180.0],
];

/// Draws the base pattern and its ground-truth boxes.
pub fn render_pattern(spec: &SceneSpec) -> Result<(ImageBuffer, Vec<BoundingBox>), SceneError> {
    let (w, h) = (spec.width, spec.height);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background = |x: usize, y: usize| {
        let fx = x as f64 / w as f64;
        let fy = y as f64 / h as f64;
        let tex = 18.0 * ((x as f64 * 0.45).sin() * (y as f64 * 0.3).cos());
        [
            90.0 + 60.0 * fy + 20.0 * fx + tex,
            110.0 + 40.0 * fy + tex,
            140.0 - 30.0 * fy + 10.0 * fx + tex,
        ]
    };
    let mut canvas: Vec<[f64; 3]> = (0..w * h).map(|i| background(i % w, i / w)).collect();
    let mut gt = Vec::new();

    match spec.pattern {
        Pattern::Gradient => {}
        Pattern::Checker { cell } => {
            for (i, px) in canvas.iter_mut().enumerate() {
                let on = ((i % w) / cell + (i / w) / cell) % 2 == 0;
                *px = if on { [220.0, 200.0, 60.0] } else { [40.0, 60.0, 120.0] };
            }
        }
        Pattern::Shapes { objects } => {
            let cols = ((objects as f64 * w as f64 / h as f64).sqrt().ceil() as usize).max(1);
            let rows = objects.div_ceil(cols).max(1);
            let (cw, ch) = (w / cols, h / rows);
            for k in 0..objects {
                let (cx, cy) = ((k % cols) * cw, (k / cols) * ch);
                let bw = ((cw as f64) * rng.random_range(0.5..0.8)) as usize;
                let bh = ((ch as f64) * rng.random_range(0.5..0.8)) as usize;
                if bw < 2 || bh < 2 {
                    return Err(SceneError::Spec("frame too small for the requested objects".into()));
                }
                let x0 = cx + rng.random_range(0..=(cw - bw));
                let y0 = cy + rng.random_range(0..=(ch - bh));
                let color = PALETTE[k % PALETTE.len()];
                for y in y0..y0 + bh {
                    let shade = if (y - y0) / 2 % 2 == 0 { 1.0 } else { 0.7 };
                    for x in x0..x0 + bw {
                        canvas[y * w + x] = color.map(|c| c * shade);
                    }
                }
                gt.push(
                    BoundingBox::new(x0 as f64, y0 as f64, (x0 + bw) as f64, (y0 + bh) as f64, (k % 2) as u32)
                        .map_err(|e| SceneError::Spec(e.to_string()))?,
                );
            }
        }
    }
    let img = ImageBuffer::new(w, h, vec![0; w * h * 3])?;
    Ok((img.with_float_data(canvas.into_iter().flatten()), gt))
}

fn noise_field(len: usize, sigma: f64, seed: u64) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![0.0; len];
    }
    let normal = Normal::new(0.0, sigma).expect("sigma checked by validate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| normal.sample(&mut rng)).collect()
}

fn add_noise(img: &ImageBuffer, field: &[f64]) -> ImageBuffer {
    img.with_float_data(img.as_raw().iter().zip(field).map(|(&v, n)| v as f64 + n))
}

fn frame_seed(seed: u64, interval: usize, seq: usize) -> u64 {
    (seed ^ ((interval as u64) << 32 | seq as u64)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

const SOLVE_ROUNDS: usize = 4;
const BISECT_STEPS: usize = 16;
const SOLVE_BOUNDS: (f64, f64) = (0.02, 4.0);

/// Finds a config whose rendering of `base` (plus `field`) measures close
/// to `target`, one knob at a time by bisection, repeated a few rounds
/// because the knobs interact.
fn solve_config(base: &ImageBuffer, field: &[f64], target: &FeatureTuple) -> Result<(KnobConfig, FeatureTuple), SceneError> {
    let measure = |cfg: &KnobConfig| -> Result<FeatureTuple, SceneError> {
        Ok(extract_features(&add_noise(&apply_config(base, cfg)?, field)))
    };
    let want = target.to_array();
    let mut cfg = [1.0; 4];
    for _ in 0..SOLVE_ROUNDS {
        for k in 0..4 {
            let (mut lo, mut hi) = SOLVE_BOUNDS;
            for _ in 0..BISECT_STEPS {
                let mid = 0.5 * (lo + hi);
                cfg[k] = mid;
                if measure(&KnobConfig::from_array(cfg))?.to_array()[k] < want[k] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cfg[k] = 0.5 * (lo + hi);
        }
    }
    let config = KnobConfig::from_array(cfg);
    Ok((config, measure(&config)?))
}

pub fn generate_scene(spec: &SceneSpec) -> Result<GeneratedScene, SceneError> {
    spec.validate()?;
    let (base, gt) = render_pattern(spec)?;
    let len = base.as_raw().len();
    let solver_field = noise_field(len, spec.noise_sigma, spec.seed);
    let reference = extract_features(&add_noise(&base, &solver_field));

    let mut intervals: Vec<usize> = spec.intervals.clone();
    intervals.sort_unstable();
    intervals.dedup();

    let mut solved: BTreeMap<[u64; 4], (KnobConfig, FeatureTuple)> = BTreeMap::new();
    let mut records = Vec::with_capacity(intervals.len());
    let mut frames = Vec::with_capacity(intervals.len() * spec.frames_per_interval);
    let mut ground_truth = BTreeMap::new();
    for &interval in &intervals {
        let m = spec.profile.multipliers(interval);
        let (config, achieved) = if m == [1.0; 4] {
            (KnobConfig::IDENTITY, reference)
        } else {
            let key = m.map(f64::to_bits);
            match solved.get(&key) {
                Some(v) => *v,
                None => {
                    let target = FeatureTuple::from_array(std::array::from_fn(|i| reference.to_array()[i] * m[i]));
                    let v = solve_config(&base, &solver_field, &target)?;
                    solved.insert(key, v);
                    v
                }
            }
        };
        records.push(IntervalRecord {
            interval,
            multipliers: m,
            config,
            achieved,
        });

        let clean = apply_config(&base, &config)?;
        let start = interval as u32 * INTERVAL_SECONDS;
        let spacing = INTERVAL_SECONDS / spec.frames_per_interval as u32;
        for seq in 0..spec.frames_per_interval {
            let time = TimeOfDay::from_seconds(start + seq as u32 * spacing)?;
            let field = noise_field(len, spec.noise_sigma, frame_seed(spec.seed, interval, seq));
            let id = frame_id(time, seq as u32);
            let tag = SceneTag {
                frame_id: id.clone(),
                gt: gt.clone(),
                reference: Some(reference),
            };
            ground_truth.insert(id, gt.clone());
            frames.push((time, seq as u32, add_noise(&clean, &field).with_tag(Some(Arc::new(tag)))));
        }
    }

    let corpus = FrameCorpus::from_frames(frames)
        .with_ground_truth(ground_truth)
        .with_reference(Some(reference));
    Ok(GeneratedScene {
        corpus,
        manifest: SceneManifest {
            spec: spec.clone(),
            reference,
            gt,
            intervals: records,
        },
    })
}

impl GeneratedScene {
    /// Writes the frames, `gt.jsonl` and `scene.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(), SceneError> {
        let dir = dir.as_ref();
        self.corpus.write_dir(dir)?;
        let file = fs::File::create(dir.join(SCENE_FILE))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &self.manifest)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(profile: DayProfile) -> SceneSpec {
        SceneSpec {
            width: 64,
            height: 48,
            profile,
            frames_per_interval: 2,
            intervals: vec![0, 48, 72],
            ..SceneSpec::tiny()
        }
    }

    #[test]
    fn deterministic() {
        let spec = small(DayProfile::Flat);
        let a = generate_scene(&spec).unwrap();
        let b = generate_scene(&spec).unwrap();
        assert_eq!(a.corpus.len(), 6);
        for (fa, fb) in a.corpus.frames().iter().zip(b.corpus.frames()) {
            assert_eq!(a.corpus.load(fa).unwrap(), b.corpus.load(fb).unwrap());
        }
    }

    #[test]
    fn gt_inside_frame() {
        let (img, gt) = render_pattern(&SceneSpec::tiny()).unwrap();
        assert_eq!(gt.len(), 6);
        for b in gt {
            assert!(b.x1 >= 0.0 && b.y1 >= 0.0);
            assert!(b.x2 <= img.width() as f64 && b.y2 <= img.height() as f64);
        }
    }

    #[test]
    fn frames_track_profile() {
        let spec = small(DayProfile::Diurnal {
            night: DayProfile::DEFAULT_NIGHT,
        });
        let scene = generate_scene(&spec).unwrap();
        let reference = scene.manifest.reference.to_array();
        for rec in &scene.manifest.intervals {
            for f in scene.corpus.frames_in(rec.interval) {
                let got = extract_features(&scene.corpus.load(f).unwrap()).to_array();
                for i in 0..4 {
                    let want = reference[i] * rec.multipliers[i];
                    assert!((got[i] - want).abs() / want < 0.1, "interval {} feature {i}", rec.interval);
                }
            }
        }
    }

    #[test]
    fn daylight_shape() {
        assert_eq!(DayProfile::daylight(0), 0.0);
        assert!(DayProfile::daylight(48) > 0.99);
        assert!(DayProfile::daylight(40) < DayProfile::daylight(47));
    }
}
