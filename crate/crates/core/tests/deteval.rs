use std::path::PathBuf;

use camtune::deteval::{
    evaluate, evaluate_frames, find_best_config, iou, read_jsonl, write_jsonl, BoundingBox, Detector, EvalResult,
    FrameEval, QualityResponse, SyntheticDetector,
};
use camtune::imaging::{apply_config, ImageBuffer, Knob, KnobConfig};
use camtune::scene::{generate_scene, SceneSpec};
use serde::Deserialize;

#[derive(Deserialize)]
struct Expected {
    map: f64,
    mean_tp_iou: f64,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
}

#[derive(Deserialize)]
struct Case {
    name: String,
    gt: Vec<BoundingBox>,
    dets: Vec<BoundingBox>,
    expected: Expected,
}

fn cases() -> Vec<Case> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/deteval/cases.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn bx(x1: f64, y1: f64, x2: f64, y2: f64) -> BoundingBox {
    BoundingBox::new(x1, y1, x2, y2, 0).unwrap()
}

#[test]
fn fixtures_score_exactly() {
    let cases = cases();
    assert_eq!(cases.len(), 3);
    for c in cases {
        assert!(c.gt.len() <= 5 && c.dets.len() <= 5);
        let r = evaluate(&c.dets, &c.gt, 0.5);
        let e = &c.expected;
        assert!((r.map - e.map).abs() < 1e-9, "{}: map {}", c.name, r.map);
        assert!((r.mean_tp_iou - e.mean_tp_iou).abs() < 1e-12, "{}", c.name);
        assert_eq!((r.tp, r.fp, r.fn_), (e.tp, e.fp, e.fn_), "{}", c.name);
    }
}

#[test]
fn iou_known_values() {
    let a = bx(0.0, 0.0, 10.0, 10.0);
    assert_eq!(iou(&a, &a), 1.0);
    assert_eq!(iou(&a, &bx(10.0, 0.0, 20.0, 10.0)), 0.0);
    assert!((iou(&a, &bx(5.0, 0.0, 15.0, 10.0)) - 1.0 / 3.0).abs() < 1e-15);
    assert!((iou(&a, &bx(0.0, 0.0, 5.0, 5.0)) - 0.25).abs() < 1e-15);
    let b = bx(3.0, 4.0, 12.0, 9.0);
    assert_eq!(iou(&a, &b), iou(&b, &a));
}

#[test]
fn threshold_is_inclusive() {
    let gt = [bx(0.0, 0.0, 10.0, 10.0)];
    let det = bx(10.0 / 3.0, 0.0, 10.0 + 10.0 / 3.0, 10.0).with_score(1.0);
    let v = iou(&det, &gt[0]);
    let r = evaluate(&[det], &gt, v);
    assert_eq!(r.tp, 1);
    let r = evaluate(&[det], &gt, v + 1e-9);
    assert_eq!(r.tp, 0);
}

#[test]
fn frames_pool_into_one_curve() {
    let g1 = [bx(0.0, 0.0, 10.0, 10.0)];
    let g2 = [bx(0.0, 0.0, 10.0, 10.0)];
    let d1 = [bx(0.0, 0.0, 10.0, 10.0).with_score(0.9)];
    let d2 = [bx(50.0, 50.0, 60.0, 60.0).with_score(0.95)];
    let r = evaluate_frames(
        &[FrameEval { dets: &d1, gt: &g1 }, FrameEval { dets: &d2, gt: &g2 }],
        0.5,
    );
    // FP first (P=0 at R=0), then TP: P=0.5 at R=0.5.
    assert!((r.map - 25.0).abs() < 1e-12);
    assert_eq!((r.tp, r.fp, r.fn_), (1, 1, 1));
}

#[test]
fn invalid_boxes_rejected() {
    assert!(BoundingBox::new(5.0, 0.0, 5.0, 1.0, 0).is_err());
    assert!(BoundingBox::new(0.0, 0.0, f64::NAN, 1.0, 0).is_err());
    assert!(bx(0.0, 0.0, 1.0, 1.0).with_score(1.5).validate().is_err());
}

#[test]
fn jsonl_round_trip() {
    let boxes = vec![bx(1.0, 2.0, 3.0, 4.0), bx(0.5, 0.5, 9.0, 9.0).with_score(0.3)];
    let mut buf = Vec::new();
    write_jsonl(&mut buf, [("f1", boxes.as_slice())]).unwrap();
    let back = read_jsonl(buf.as_slice()).unwrap();
    assert_eq!(back["f1"], boxes);
}

fn grid3() -> Vec<KnobConfig> {
    let vals: Vec<[f64; 3]> = Knob::ALL
        .iter()
        .map(|k| {
            let r = k.camera_range();
            [r.lo, 1.0, r.hi]
        })
        .collect();
    let mut out = Vec::new();
    for &b in &vals[0] {
        for &c in &vals[1] {
            for &s in &vals[2] {
                for &h in &vals[3] {
                    out.push(KnobConfig::new(b, c, s, h));
                }
            }
        }
    }
    out
}

// Exhaustive two-key lexicographic search: mAP first, TP IoU second; the
// first config in grid order wins ties.
fn brute_force(img: &ImageBuffer, gt: &[BoundingBox], det: &dyn Detector, grid: &[KnobConfig]) -> (KnobConfig, EvalResult) {
    let mut best: Option<(KnobConfig, EvalResult)> = None;
    for cfg in grid {
        let r = evaluate(&det.detect(&apply_config(img, cfg).unwrap()).unwrap(), gt, 0.5);
        let better = match &best {
            None => true,
            Some((_, b)) => r.map > b.map || (r.map == b.map && r.mean_tp_iou > b.mean_tp_iou),
        };
        if better {
            best = Some((*cfg, r));
        }
    }
    best.unwrap()
}

fn scene_frame() -> ImageBuffer {
    let spec = SceneSpec {
        frames_per_interval: 1,
        ..SceneSpec::tiny()
    };
    let scene = generate_scene(&spec).unwrap();
    let corpus = &scene.corpus;
    let frame = corpus.frames_in(0).next().unwrap();
    corpus.load(frame).unwrap()
}

#[test]
fn best_config_matches_exhaustive_search() {
    let img = scene_frame();
    let gt = img.tag().unwrap().gt.clone();
    let grid = grid3();
    assert_eq!(grid.len(), 81);
    let responses = [
        QualityResponse::Unimodal { peak: [1.0; 4], width: [0.6; 4] },
        QualityResponse::Unimodal { peak: [1.3, 1.0, 0.8, 1.0], width: [0.3, 0.5, 0.5, 1.0] },
        QualityResponse::Constant { value: 0.7 },
    ];
    for response in responses {
        let det = SyntheticDetector::new(response.clone()).unwrap();
        let got = find_best_config(&img, &gt, &det, &grid).unwrap();
        let (cfg, r) = brute_force(&img, &gt, &det, &grid);
        assert_eq!(got.best.config, cfg, "{response:?}");
        assert_eq!(got.best.result, r);
        assert_eq!(got.ranking.len(), 81);
        assert_eq!(got.failed, 0);
    }
}

#[test]
fn empty_grid_is_an_error() {
    let img = scene_frame();
    let det = SyntheticDetector::new(QualityResponse::Constant { value: 1.0 }).unwrap();
    assert!(find_best_config(&img, &[], &det, &[]).is_err());
}

#[test]
fn synthetic_detector_perfect_at_full_quality() {
    let img = scene_frame();
    let gt = img.tag().unwrap().gt.clone();
    let det = SyntheticDetector::new(QualityResponse::Constant { value: 1.0 }).unwrap();
    let r = evaluate(&det.detect(&img).unwrap(), &gt, 0.5);
    assert_eq!(r.map, 100.0);
    assert_eq!(r.fn_, 0);
    let none = SyntheticDetector::new(QualityResponse::Constant { value: 0.0 }).unwrap();
    assert!(none.detect(&img).unwrap().is_empty());
    assert!(SyntheticDetector::new(QualityResponse::Constant { value: 1.5 }).is_err());
}

#[test]
fn untagged_frames_cannot_be_detected() {
    let det = SyntheticDetector::new(QualityResponse::Constant { value: 1.0 }).unwrap();
    let img = ImageBuffer::filled(16, 16, [9, 9, 9]).unwrap();
    assert!(det.detect(&img).is_err());
}
