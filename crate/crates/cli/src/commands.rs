use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use serde::Serialize;

use camtune::calibration::{
    calibrate as calibrate_knob, default_camera_values, default_knob_grid, CameraDevice, HiddenMap, HttpCamera,
    HttpCameraConfig, KnobMap, SetMethod, SyntheticCamera,
};
use camtune::deteval::{find_best_config, QualityResponse, SyntheticDetector};
use camtune::estimator::{EstimatorRegistry, EstimatorSettings, QualityEstimator, Transport};
use camtune::harness::{ab_evaluate, tune_day, write_report, AbConfig};
use camtune::imaging::{read_image, write_image, Knob};
use camtune::metrics::FeatureTuple;
use camtune::rl::{write_trace, AgentConfig, KnobLattice, Policy, PolicyRegistry, QTable};
use camtune::scene::{generate_scene, render_pattern, SceneSpec};
use camtune::vcam::{
    render_to_time, DeltaTable, FrameCorpus, KnobGrids, TimeOfDay, VcTable, DEFAULT_DELTA_STEP,
};

use crate::config::{existing, RunConfig};
use crate::error::{config, data, CliError};
use crate::{
    AbEvalArgs, AgentArgs, CalibrateArgs, CameraKind, CorpusArgs, GenSceneArgs, HiddenKind, Preset, SweepArgs,
    TableArgs, TuneArgs, VcRenderArgs,
};

const DEFAULT_OUT: &str = "camtune-out";
const DEFAULT_WIDTH: f64 = 0.6;

pub struct Context {
    cfg: RunConfig,
    seed: Option<u64>,
    out: PathBuf,
}

impl Context {
    pub fn new(cfg: RunConfig, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self, CliError> {
        let seed = seed.or(cfg.seed);
        let out = out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        Ok(Self { cfg, seed, out })
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        fs::create_dir_all(&self.out).map_err(|e| config(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(&self.out)
    }

    fn write(&self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.out_dir()?.join(name);
        fs::write(&path, bytes).map_err(data)?;
        Ok(path)
    }

    fn corpus_path(&self, a: &CorpusArgs) -> Option<PathBuf> {
        a.corpus.clone().or_else(|| self.cfg.corpus.clone())
    }

    fn load_corpus(&self, a: &CorpusArgs) -> Result<FrameCorpus, CliError> {
        let path = self
            .corpus_path(a)
            .ok_or_else(|| config("no corpus given (--corpus or `corpus`)"))?;
        let path = existing(path, "corpus")?;
        let corpus = FrameCorpus::from_dir(&path).map_err(data)?;
        info!("loaded {} frames from {}", corpus.len(), path.display());
        Ok(corpus)
    }

    fn delta_grids(&self) -> Result<KnobGrids, CliError> {
        let step = self.cfg.delta_step.unwrap_or(DEFAULT_DELTA_STEP);
        grid_for_step(step)
    }

    fn tables(&self, a: &TableArgs, corpus: &FrameCorpus) -> Result<(VcTable, DeltaTable), CliError> {
        let vc_path = a.vc.clone().or_else(|| self.cfg.vc_table.clone());
        let dt_path = a.delta.clone().or_else(|| self.cfg.delta_table.clone());
        let vc = match vc_path {
            Some(p) => {
                let vc: VcTable = read_json(&existing(p, "vc table")?)?;
                vc.validate().map_err(data)?;
                vc
            }
            None => {
                let (vc, stats) = VcTable::build(corpus).map_err(data)?;
                info!("built vc table from {} frames ({} skipped)", stats.frames_used, stats.frames_skipped);
                vc
            }
        };
        let dt = match dt_path {
            Some(p) => {
                let dt: DeltaTable = read_json(&existing(p, "delta table")?)?;
                dt.validate().map_err(data)?;
                dt
            }
            None => {
                let grids = self.delta_grids()?;
                info!("building delta table over {} configs", grids.len());
                DeltaTable::build(corpus, &grids, self.seed.unwrap_or(0)).map_err(data)?
            }
        };
        Ok((vc, dt))
    }

    fn response(&self) -> Result<QualityResponse, CliError> {
        let r = QualityResponse::Unimodal {
            peak: self.cfg.response_peak.unwrap_or([1.0; 4]),
            width: self.cfg.response_width.unwrap_or([DEFAULT_WIDTH; 4]),
        };
        r.validate().map_err(config)?;
        Ok(r)
    }

    fn detector(&self) -> Result<SyntheticDetector, CliError> {
        SyntheticDetector::new(self.response()?).map_err(config)
    }

    fn agent(&self) -> Result<AgentConfig, CliError> {
        let d = AgentConfig::default();
        let a = AgentConfig {
            alpha: self.cfg.alpha.unwrap_or(d.alpha),
            gamma: self.cfg.gamma.unwrap_or(d.gamma),
            epsilon: self.cfg.epsilon.unwrap_or(d.epsilon),
            seed: self.seed.unwrap_or(d.seed),
        };
        a.validate().map_err(config)?;
        Ok(a)
    }

    fn lattice(&self) -> Result<KnobLattice, CliError> {
        let mut active = [true; 4];
        if let Some(names) = &self.cfg.knobs {
            active = [false; 4];
            for n in names {
                let k: Knob = n.parse().map_err(config)?;
                active[k.index()] = true;
            }
        }
        match self.cfg.knob_steps {
            Some(steps) => KnobLattice::with_steps(active, steps).map_err(config),
            None => Ok(KnobLattice::new(active)),
        }
    }

    fn ab_config(&self, a: &AgentArgs) -> Result<AbConfig, CliError> {
        let d = AbConfig::default();
        let source_time = match &self.cfg.source_time {
            Some(t) => t.parse().map_err(config)?,
            None => d.source_time,
        };
        let upper_grid = match self.cfg.upper_grid.as_deref() {
            None => d.upper_grid,
            Some("none") => None,
            Some(g) => Some(named_grid(g)?),
        };
        Ok(AbConfig {
            agent: self.agent()?,
            lattice: self.lattice()?,
            source_time,
            train_passes: a.passes.or(self.cfg.train_passes).unwrap_or(d.train_passes),
            eval_epsilon: self.cfg.eval_epsilon.or(d.eval_epsilon),
            frames_per_interval: self.cfg.frames_per_interval.or(d.frames_per_interval),
            ticks_per_interval: self.cfg.ticks_per_interval.or(d.ticks_per_interval),
            upper_grid,
        })
    }

    fn estimator(&self, a: &AgentArgs, reference: Option<&FeatureTuple>) -> Result<Box<dyn QualityEstimator>, CliError> {
        let name = a
            .estimator
            .clone()
            .or_else(|| self.cfg.estimator.clone())
            .unwrap_or_else(|| "oracle".into());
        let d = EstimatorSettings::default();
        let transport = match (&self.cfg.external_program, &self.cfg.external_addr) {
            (Some(_), Some(_)) => return Err(config("set only one of external_program and external_addr")),
            (Some(program), None) => Some(Transport::Stdio {
                program: program.clone(),
                args: self.cfg.external_args.clone().unwrap_or_default(),
            }),
            (None, Some(addr)) => Some(Transport::Tcp { addr: addr.clone() }),
            (None, None) => None,
        };
        let settings = EstimatorSettings {
            response: Some(self.response()?),
            ideal: self.cfg.proxy_ideal.map(FeatureTuple::from_array).or(reference.copied()),
            weights: self.cfg.proxy_weights.unwrap_or(d.weights),
            transport,
            timeout_ms: self.cfg.estimator_timeout_ms.unwrap_or(d.timeout_ms),
            max_label: self.cfg.max_label.unwrap_or(d.max_label),
        };
        EstimatorRegistry::with_builtins().create(&name, &settings).map_err(config)
    }

    fn policy(&self, a: &AgentArgs) -> Result<Box<dyn Policy>, CliError> {
        let name = a.policy.clone().or_else(|| self.cfg.policy.clone()).unwrap_or_else(|| "revert-greedy".into());
        PolicyRegistry::with_builtins().create(&name).map_err(config)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(data)?;
    serde_json::from_str(&text).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(data)
}

fn grid_for_step(step: f64) -> Result<KnobGrids, CliError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(config(format!("grid step {step} must be positive")));
    }
    let g = KnobGrids::anchored(step);
    g.validate().map_err(config)?;
    Ok(g)
}

/// `coarse` (step 0.5), `fine` (step 0.25) or a step size.
fn named_grid(name: &str) -> Result<KnobGrids, CliError> {
    match name {
        "coarse" => grid_for_step(0.5),
        "fine" => grid_for_step(DEFAULT_DELTA_STEP),
        other => grid_for_step(other.parse().map_err(|_| config(format!("unknown grid `{other}`")))?),
    }
}

pub fn calibrate(ctx: &Context, a: CalibrateArgs) -> Result<(), CliError> {
    let mut cam: Box<dyn CameraDevice> = match a.camera {
        CameraKind::Synthetic => {
            let base = match &a.base {
                Some(p) => read_image(existing(p.clone(), "base image")?).map_err(data)?,
                None => render_pattern(&SceneSpec::tiny()).map_err(data)?.0,
            };
            let make = match a.hidden {
                HiddenKind::Linear => HiddenMap::linear_for,
                HiddenKind::Convex => HiddenMap::convex_for,
                HiddenKind::Concave => HiddenMap::concave_for,
            };
            Box::new(SyntheticCamera::uniform(base, make))
        }
        CameraKind::Http => {
            let c = &ctx.cfg;
            let need = |v: &Option<String>, key: &str| v.clone().ok_or_else(|| config(format!("http camera needs `{key}`")));
            let set_method = match c.camera_set_method.as_deref() {
                None | Some("get") => SetMethod::Get,
                Some("put") => SetMethod::Put,
                Some(m) => return Err(config(format!("unknown camera_set_method `{m}`"))),
            };
            Box::new(HttpCamera::new(HttpCameraConfig {
                set_url: need(&c.camera_set_url, "camera_set_url")?,
                set_method,
                get_url: need(&c.camera_get_url, "camera_get_url")?,
                capture_url: need(&c.camera_capture_url, "camera_capture_url")?,
                timeout_ms: c.camera_timeout_ms.unwrap_or(5_000),
            }))
        }
    };
    let knobs: Vec<Knob> = match a.knob {
        Some(k) => vec![k],
        None => Knob::ALL.to_vec(),
    };
    let mut map = KnobMap::default();
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["knob", "camera_value", "factor", "ssim", "low_confidence"]).map_err(data)?;
    for knob in knobs {
        let points = calibrate_knob(cam.as_mut(), knob, &default_camera_values(), &default_knob_grid(knob)).map_err(data)?;
        let worst = points.iter().map(|p| p.ssim).fold(f64::INFINITY, f64::min);
        info!("{knob}: {} points, lowest best-match ssim {worst:.4}", points.len());
        for p in &points {
            csv.write_record([
                knob.name().to_string(),
                p.camera_value.to_string(),
                p.factor.to_string(),
                p.ssim.to_string(),
                p.low_confidence.to_string(),
            ])
            .map_err(data)?;
        }
        map.insert(knob, points);
    }
    ctx.write("knob_map.json", map.to_json().map_err(data)?)?;
    let path = ctx.write("calibration.csv", csv.into_inner().map_err(data)?)?;
    info!("wrote {}", path.display());
    Ok(())
}

pub fn vc_build(ctx: &Context, a: CorpusArgs) -> Result<(), CliError> {
    let corpus = ctx.load_corpus(&a)?;
    let (vc, dt) = ctx.tables(&TableArgs { vc: None, delta: None }, &corpus)?;
    ctx.write("vc_table.json", to_json(&vc)?)?;
    let path = ctx.write("delta_table.json", to_json(&dt)?)?;
    info!("wrote tables to {}", path.parent().unwrap_or(Path::new(".")).display());
    Ok(())
}

#[derive(Serialize)]
struct RenderInfo<'a> {
    t1: String,
    t2: String,
    frame_id: &'a str,
    config: camtune::imaging::KnobConfig,
    tiles: &'a [camtune::vcam::TileMatch],
}

pub fn vc_render(ctx: &Context, a: VcRenderArgs) -> Result<(), CliError> {
    let t1: TimeOfDay = a.t1.parse().map_err(config)?;
    let t2: TimeOfDay = a.t2.parse().map_err(config)?;
    let corpus = ctx.load_corpus(&a.corpus)?;
    let frame = corpus
        .frames()
        .iter()
        .find(|f| f.interval() == t1.interval() && f.seq == a.seq)
        .ok_or_else(|| data(format!("no frame {} in the interval of {t1}", a.seq)))?;
    let (vc, dt) = ctx.tables(&a.tables, &corpus)?;
    let img = corpus.load(frame).map_err(data)?;
    let r = render_to_time(&img, t1, t2, &vc, &dt).map_err(data)?;
    let stem = |t: TimeOfDay| {
        let (h, m, _) = t.hms();
        format!("{h:02}{m:02}")
    };
    let name = format!("render_{}_to_{}.png", stem(t1), stem(t2));
    let path = ctx.out_dir()?.join(&name);
    write_image(&r.image, &path).map_err(data)?;
    let info = RenderInfo {
        t1: t1.to_string(),
        t2: t2.to_string(),
        frame_id: &frame.frame_id,
        config: r.config,
        tiles: &r.tiles,
    };
    ctx.write(&name.replace(".png", ".json"), to_json(&info)?)?;
    info!("wrote {} (config {:?})", path.display(), r.config.to_array());
    Ok(())
}

pub fn sweep(ctx: &Context, a: SweepArgs) -> Result<(), CliError> {
    let grid = named_grid(a.grid.as_deref().or(ctx.cfg.sweep_grid.as_deref()).unwrap_or("coarse"))?;
    let corpus = ctx.load_corpus(&a.corpus)?;
    let frame = match &a.frame {
        Some(id) => corpus
            .frames()
            .iter()
            .find(|f| &f.frame_id == id)
            .ok_or_else(|| data(format!("no frame `{id}`")))?,
        None => corpus.frames().first().ok_or_else(|| data("corpus is empty"))?,
    };
    let img = corpus.load(frame).map_err(data)?;
    let gt = img
        .tag()
        .map(|t| t.gt.clone())
        .ok_or_else(|| data(format!("frame `{}` has no ground truth", frame.frame_id)))?;
    let detector = ctx.detector()?;
    let outcome = find_best_config(&img, &gt, &detector, &grid.configs()).map_err(data)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "rank",
        "brightness",
        "contrast",
        "color_saturation",
        "sharpness",
        "map",
        "mean_tp_iou",
        "tp",
        "fp",
        "fn",
    ])
    .map_err(data)?;
    for (i, r) in outcome.ranking.iter().enumerate() {
        let c = r.config.to_array();
        w.write_record([
            (i + 1).to_string(),
            c[0].to_string(),
            c[1].to_string(),
            c[2].to_string(),
            c[3].to_string(),
            r.result.map.to_string(),
            r.result.mean_tp_iou.to_string(),
            r.result.tp.to_string(),
            r.result.fp.to_string(),
            r.result.fn_.to_string(),
        ])
        .map_err(data)?;
    }
    let path = ctx.write("sweep.csv", w.into_inner().map_err(data)?)?;
    info!(
        "best config {:?}: mAP {:.2}, {} ranked, {} failed; wrote {}",
        outcome.best.config.to_array(),
        outcome.best.result.map,
        outcome.ranking.len(),
        outcome.failed,
        path.display()
    );
    Ok(())
}

pub fn tune(ctx: &Context, a: TuneArgs) -> Result<(), CliError> {
    let cfg = ctx.ab_config(&a.agent)?;
    let corpus = ctx.load_corpus(&a.corpus)?;
    let mut q = match a.qtable.clone().or_else(|| ctx.cfg.qtable.clone()) {
        Some(p) => {
            let text = fs::read_to_string(existing(p, "q-table")?).map_err(data)?;
            QTable::from_json(&text).map_err(data)?
        }
        None => QTable::new(),
    };
    let mut estimator = ctx.estimator(&a.agent, corpus.reference())?;
    let mut policy = ctx.policy(&a.agent)?;
    let run = tune_day(&corpus, estimator.as_mut(), policy.as_mut(), &mut q, &cfg).map_err(data)?;
    let out = ctx.out_dir()?;
    fs::create_dir_all(out.join("traces")).map_err(data)?;
    for (iv, ep) in &run.episodes {
        let (h, m, _) = TimeOfDay::interval_start(*iv).map_err(data)?.hms();
        let file = fs::File::create(out.join("traces").join(format!("trace_{h:02}{m:02}.csv"))).map_err(data)?;
        write_trace(file, &ep.steps).map_err(data)?;
    }
    ctx.write("qtable.json", q.to_json().map_err(data)?)?;
    info!(
        "tuned over {} intervals; {} states learned; final knobs {:?}",
        run.episodes.len(),
        q.states(),
        cfg.lattice.config(&run.final_levels).to_array()
    );
    Ok(())
}

pub fn ab_eval(ctx: &Context, a: AbEvalArgs) -> Result<(), CliError> {
    let cfg = ctx.ab_config(&a.agent)?;
    let corpus = match ctx.corpus_path(&a.corpus) {
        Some(_) => ctx.load_corpus(&a.corpus)?,
        None => {
            info!("no corpus given; generating the tiny scene");
            generate_scene(&SceneSpec::tiny()).map_err(data)?.corpus
        }
    };
    let (vc, dt) = ctx.tables(&a.tables, &corpus)?;
    let detector = Arc::new(ctx.detector()?);
    let mut estimator = ctx.estimator(&a.agent, corpus.reference())?;
    let mut policy = ctx.policy(&a.agent)?;
    let report = ab_evaluate(&corpus, &vc, &dt, detector.as_ref(), estimator.as_mut(), policy.as_mut(), &cfg)
        .map_err(data)?;
    let out = ctx.out_dir()?;
    write_report(&report, out).map_err(data)?;
    info!(
        "baseline quality {:.4}, tuned {:.4} ({:+.2} pp); pooled mAP {:.2} -> {:.2}; wrote {}",
        report.mean_baseline_quality(),
        report.mean_tuned_quality(),
        report.quality_gain_pct(),
        report.baseline_map,
        report.tuned_map,
        out.display()
    );
    Ok(())
}

pub fn gen_scene(ctx: &Context, a: GenSceneArgs) -> Result<(), CliError> {
    let preset = match (a.preset, ctx.cfg.scene_preset.as_deref()) {
        (Some(p), _) => p,
        (None, None | Some("tiny")) => Preset::Tiny,
        (None, Some("full_day")) => Preset::FullDay,
        (None, Some(other)) => return Err(config(format!("unknown scene_preset `{other}`"))),
    };
    let mut spec = match preset {
        Preset::Tiny => SceneSpec::tiny(),
        Preset::FullDay => SceneSpec::full_day(SceneSpec::tiny().frames_per_interval),
    };
    if let Some(n) = a.frames_per_interval.or(ctx.cfg.scene_frames_per_interval) {
        spec.frames_per_interval = n;
    }
    if let Some(s) = ctx.cfg.scene_noise_sigma {
        spec.noise_sigma = s;
    }
    if let Some(seed) = ctx.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(config)?;
    let scene = generate_scene(&spec).map_err(data)?;
    let out = ctx.out_dir()?;
    scene.write(out).map_err(data)?;
    info!("wrote {} frames to {}", scene.corpus.len(), out.display());
    Ok(())
}

