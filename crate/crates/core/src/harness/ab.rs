use std::collections::BTreeMap;

use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::HarnessError;
use crate::deteval::{evaluate_frames, find_best_config, BoundingBox, Detector, EvalResult, FrameEval, DEFAULT_IOU_THRESHOLD};
use crate::estimator::QualityEstimator;
use crate::imaging::{apply_config, ImageBuffer, KnobConfig};
use crate::metrics::extract_features;
use crate::rl::{run_episode, AgentConfig, Episode, FeatureBinner, KnobLattice, Levels, Policy, QTable, RlError, StepRecord, TunableEnv};
use crate::vcam::{render_to_time, DeltaTable, FrameCorpus, KnobGrids, TimeOfDay, VcTable};

#[derive(Clone, Debug)]
pub struct AbConfig {
    pub agent: AgentConfig,
    pub lattice: KnobLattice,
    /// Interval whose frames are re-rendered to every other interval.
    pub source_time: TimeOfDay,
    /// Full passes over the day before the scored pass.
    pub train_passes: usize,
    /// Epsilon for the scored pass; `None` keeps `agent.epsilon`.
    pub eval_epsilon: Option<f64>,
    /// Source frames used per interval; `None` uses all of them.
    pub frames_per_interval: Option<usize>,
    /// Agent steps per interval; frames repeat in order when this exceeds
    /// the frame count. `None` is one step per frame.
    pub ticks_per_interval: Option<usize>,
    /// Grid for the per-interval exhaustive upper bound; `None` skips it.
    pub upper_grid: Option<KnobGrids>,
}

impl Default for AbConfig {
    fn default() -> Self {
        Self {
            agent: AgentConfig::default(),
            lattice: KnobLattice::all(),
            source_time: TimeOfDay::from_hms(12, 0, 0).expect("valid time"),
            train_passes: 2,
            eval_epsilon: None,
            frames_per_interval: None,
            ticks_per_interval: Some(60),
            upper_grid: Some(KnobGrids::anchored(0.5)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalReport {
    pub interval: usize,
    pub time: String,
    pub baseline_quality: f64,
    pub tuned_quality: f64,
    pub baseline: EvalResult,
    pub tuned: EvalResult,
    pub upper: Option<EvalResult>,
    pub upper_config: Option<KnobConfig>,
    /// Knob config in effect at the end of the interval.
    pub tuned_config: KnobConfig,
}

impl IntervalReport {
    /// mAP gain in percentage points.
    pub fn improvement_pct(&self) -> f64 {
        self.tuned.map - self.baseline.map
    }
}

#[derive(Clone, Debug)]
pub struct AbReport {
    pub source_interval: usize,
    pub intervals: Vec<IntervalReport>,
    pub baseline_map: f64,
    pub tuned_map: f64,
    /// Scored-pass traces keyed by interval.
    pub traces: BTreeMap<usize, Vec<StepRecord>>,
    pub q: QTable,
}

impl AbReport {
    pub fn mean_baseline_quality(&self) -> f64 {
        mean(self.intervals.iter().map(|r| r.baseline_quality))
    }

    pub fn mean_tuned_quality(&self) -> f64 {
        mean(self.intervals.iter().map(|r| r.tuned_quality))
    }

    /// Mean tuned minus mean baseline quality, in percentage points.
    pub fn quality_gain_pct(&self) -> f64 {
        100.0 * (self.mean_tuned_quality() - self.mean_baseline_quality())
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

struct DayEnv<'a> {
    frames: &'a [ImageBuffer],
    pos: usize,
    ticks: usize,
    lattice: KnobLattice,
    levels: Levels,
    record: bool,
    emitted: Vec<ImageBuffer>,
}

impl TunableEnv for DayEnv<'_> {
    fn lattice(&self) -> &KnobLattice {
        &self.lattice
    }

    fn levels(&self) -> Levels {
        self.levels
    }

    fn set_levels(&mut self, levels: Levels) -> Result<(), RlError> {
        self.levels = levels;
        Ok(())
    }

    fn next_frame(&mut self) -> Result<Option<ImageBuffer>, RlError> {
        if self.pos >= self.ticks {
            return Ok(None);
        }
        let src = &self.frames[self.pos % self.frames.len()];
        self.pos += 1;
        let img = apply_config(src, &self.lattice.config(&self.levels))?;
        if self.record {
            self.emitted.push(img.clone());
        }
        Ok(Some(img))
    }
}

/// Runs the fixed-knob baseline and the tuned pipeline over the same
/// simulated day and scores both.
///
/// The day is simulated by re-rendering the frames of the source interval
/// to every interval in `vc`. The baseline sees those frames unchanged. The
/// tuned pipeline applies its current knob levels to each frame and runs
/// one SARSA episode per interval; levels and the Q-table carry over from
/// interval to interval and across passes. Only the last pass is scored.
#[allow(clippy::too_many_arguments)]
pub fn ab_evaluate(
    corpus: &FrameCorpus,
    vc: &VcTable,
    dt: &DeltaTable,
    detector: &dyn Detector,
    estimator: &mut dyn QualityEstimator,
    policy: &mut dyn Policy,
    cfg: &AbConfig,
) -> Result<AbReport, HarnessError> {
    cfg.agent.validate()?;
    let eval_agent = AgentConfig {
        epsilon: cfg.eval_epsilon.unwrap_or(cfg.agent.epsilon),
        ..cfg.agent.clone()
    };
    eval_agent.validate()?;
    let intervals: Vec<usize> = vc.present().collect();
    if intervals.is_empty() {
        return Err(HarnessError::Config("virtual camera table has no intervals".into()));
    }
    let source_interval = nearest_interval(corpus, cfg.source_time.interval())?;
    let t_src = TimeOfDay::interval_start(source_interval)?;
    let limit = cfg.frames_per_interval.unwrap_or(usize::MAX);
    let sources: Vec<ImageBuffer> = corpus
        .frames_in(source_interval)
        .take(limit)
        .map(|f| corpus.load(f))
        .collect::<Result<_, _>>()?;
    if sources.is_empty() || sources.iter().any(|img| img.tag().is_none()) {
        return Err(HarnessError::MissingGroundTruth(format!("interval {source_interval}")));
    }
    info!("simulating {} intervals from {} frames at {t_src}", intervals.len(), sources.len());

    let mut day: Vec<(usize, Vec<ImageBuffer>)> = Vec::with_capacity(intervals.len());
    for &iv in &intervals {
        let t = TimeOfDay::interval_start(iv)?;
        let frames = sources
            .iter()
            .map(|f| Ok(render_to_time(f, t_src, t, vc, dt)?.image))
            .collect::<Result<Vec<_>, HarnessError>>()?;
        day.push((iv, frames));
    }

    let feats: Vec<_> = day.iter().flat_map(|(_, f)| f.iter().map(extract_features)).collect();
    let binner = FeatureBinner::from_observations(&feats)?;

    let mut q = QTable::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.agent.seed);
    let mut levels: Levels = [0; 4];
    let mut traces = BTreeMap::new();
    let mut reports = Vec::with_capacity(day.len());
    let mut all_baseline: Vec<(Vec<BoundingBox>, &[BoundingBox])> = Vec::new();
    let mut all_tuned: Vec<(Vec<BoundingBox>, &[BoundingBox])> = Vec::new();

    for pass in 0..=cfg.train_passes {
        let scored = pass == cfg.train_passes;
        let agent = if scored { &eval_agent } else { &cfg.agent };
        for (iv, frames) in &day {
            let ticks = cfg.ticks_per_interval.unwrap_or(frames.len()).max(1);
            let mut env = DayEnv {
                frames,
                pos: 0,
                ticks,
                lattice: cfg.lattice.clone(),
                levels,
                record: scored,
                emitted: Vec::with_capacity(ticks),
            };
            let steps = ticks - 1;
            let ep = run_episode(&mut env, estimator, policy, &mut q, &binner, agent, &mut rng, steps)?;
            levels = env.levels;
            debug!("pass {pass} interval {iv}: levels {levels:?}");
            if !scored {
                continue;
            }

            let baseline_quality = mean(frames.iter().filter_map(|f| estimator.estimate(f).ok().map(|e| e.value)));
            let tuned_quality = mean(ep.qualities());
            let base_dets = detect_all(detector, frames)?;
            let tuned_dets = detect_all(detector, &env.emitted)?;
            let baseline = score(&base_dets, frames);
            let tuned = score(&tuned_dets, &env.emitted);
            debug_assert_eq!(env.emitted.len(), ticks);
            let (upper, upper_config) = match &cfg.upper_grid {
                Some(grid) => {
                    let f = &frames[0];
                    let gt = &f.tag().expect("checked above").gt;
                    let best = find_best_config(f, gt, detector, &grid.configs())?.best;
                    (Some(best.result), Some(best.config))
                }
                None => (None, None),
            };
            reports.push(IntervalReport {
                interval: *iv,
                time: TimeOfDay::interval_start(*iv)?.to_string(),
                baseline_quality,
                tuned_quality,
                baseline,
                tuned,
                upper,
                upper_config,
                tuned_config: cfg.lattice.config(&levels),
            });
            for (d, f) in base_dets.into_iter().zip(frames) {
                all_baseline.push((d, &f.tag().expect("checked above").gt));
            }
            for (d, f) in tuned_dets.into_iter().zip(frames.iter().cycle()) {
                all_tuned.push((d, &f.tag().expect("checked above").gt));
            }
            traces.insert(*iv, ep.steps);
        }
    }

    let pooled = |v: &[(Vec<BoundingBox>, &[BoundingBox])]| {
        let frames: Vec<FrameEval> = v.iter().map(|(d, g)| FrameEval { dets: d, gt: g }).collect();
        evaluate_frames(&frames, DEFAULT_IOU_THRESHOLD).map
    };
    Ok(AbReport {
        source_interval,
        baseline_map: pooled(&all_baseline),
        tuned_map: pooled(&all_tuned),
        intervals: reports,
        traces,
        q,
    })
}

/// Outcome of [`tune_day`].
#[derive(Clone, Debug)]
pub struct TuneRun {
    /// Last pass, keyed by interval.
    pub episodes: BTreeMap<usize, Episode>,
    pub final_levels: Levels,
}

/// Trains the agent on the corpus itself: each interval's own frames, in
/// time order, for `cfg.train_passes + 1` passes. `q` is updated in place.
/// The virtual camera and the upper-bound grid are not used.
pub fn tune_day(
    corpus: &FrameCorpus,
    estimator: &mut dyn QualityEstimator,
    policy: &mut dyn Policy,
    q: &mut QTable,
    cfg: &AbConfig,
) -> Result<TuneRun, HarnessError> {
    cfg.agent.validate()?;
    let limit = cfg.frames_per_interval.unwrap_or(usize::MAX);
    let mut day: Vec<(usize, Vec<ImageBuffer>)> = Vec::new();
    for (iv, idx) in corpus.intervals() {
        let frames = idx
            .iter()
            .take(limit)
            .map(|&i| corpus.load(&corpus.frames()[i]))
            .collect::<Result<Vec<_>, _>>()?;
        day.push((iv, frames));
    }
    if day.is_empty() {
        return Err(HarnessError::Config("corpus has no frames".into()));
    }
    let feats: Vec<_> = day.iter().flat_map(|(_, f)| f.iter().map(extract_features)).collect();
    let binner = FeatureBinner::from_observations(&feats)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.agent.seed);
    let mut levels: Levels = [0; 4];
    let mut episodes = BTreeMap::new();
    for pass in 0..=cfg.train_passes {
        for (iv, frames) in &day {
            let ticks = cfg.ticks_per_interval.unwrap_or(frames.len()).max(1);
            let mut env = DayEnv {
                frames,
                pos: 0,
                ticks,
                lattice: cfg.lattice.clone(),
                levels,
                record: false,
                emitted: Vec::new(),
            };
            let ep = run_episode(&mut env, estimator, policy, q, &binner, &cfg.agent, &mut rng, ticks - 1)?;
            levels = env.levels;
            if pass == cfg.train_passes {
                episodes.insert(*iv, ep);
            }
        }
    }
    Ok(TuneRun {
        episodes,
        final_levels: levels,
    })
}

fn nearest_interval(corpus: &FrameCorpus, want: usize) -> Result<usize, HarnessError> {
    corpus
        .intervals()
        .into_keys()
        .min_by_key(|iv| (iv.abs_diff(want), *iv))
        .ok_or_else(|| HarnessError::Config("corpus has no frames".into()))
}

fn detect_all(detector: &dyn Detector, frames: &[ImageBuffer]) -> Result<Vec<Vec<BoundingBox>>, HarnessError> {
    frames.iter().map(|f| Ok(detector.detect(f)?)).collect()
}

fn score(dets: &[Vec<BoundingBox>], frames: &[ImageBuffer]) -> EvalResult {
    let evals: Vec<FrameEval> = dets
        .iter()
        .zip(frames)
        .map(|(d, f)| FrameEval {
            dets: d,
            gt: &f.tag().expect("tagged").gt,
        })
        .collect();
    evaluate_frames(&evals, DEFAULT_IOU_THRESHOLD)
}
