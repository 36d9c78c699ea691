use std::io::{BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use camtune::deteval::{evaluate, Detector, QualityResponse, SyntheticDetector, DEFAULT_IOU_THRESHOLD};
use camtune::estimator::{
    detection_label, parse_response, AquaGate, EstimatorError, EstimatorRegistry, EstimatorSettings,
    ExternalEstimator, GateDecision, OracleEstimator, ProxyEstimator, QualityEstimate, QualityEstimator, Transport,
    MAX_DETECTION_LABEL,
};
use camtune::imaging::{decode_png, ImageBuffer};
use camtune::metrics::{extract_features, FeatureTuple};
use camtune::scene::{generate_scene, SceneSpec};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scene_frame() -> ImageBuffer {
    let spec = SceneSpec {
        frames_per_interval: 1,
        intervals: vec![48],
        ..SceneSpec::tiny()
    };
    let scene = generate_scene(&spec).unwrap();
    scene.corpus.load(&scene.corpus.frames()[0]).unwrap()
}

#[test]
fn label_matches_rounded_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let map: f64 = rng.random_range(0.0..=100.0);
        let iou: f64 = rng.random_range(0.0..=1.0);
        let want = (map + 100.0 * iou + 0.5).floor() as u32;
        assert_eq!(detection_label(map, iou).unwrap(), want);
    }
    assert_eq!(detection_label(100.0, 1.0).unwrap(), MAX_DETECTION_LABEL);
}

#[test]
fn reply_parsing() {
    let e = parse_response("label 57\n", 100).unwrap();
    assert_eq!(e.class_label, Some(57));
    assert!((e.value - 0.57).abs() < 1e-15);
    assert_eq!(parse_response("value 0.25", 200).unwrap(), QualityEstimate::from_value(0.25));
    for bad in ["label 101", "value 2", "value", "label 3 4", "hello 1"] {
        assert!(parse_response(bad, 100).is_err(), "{bad}");
    }
}

#[test]
fn proxy_score_is_exponential_penalty() {
    let ideal = FeatureTuple::new(100.0, 40.0, 0.2, 5.0);
    let w = [0.4, 0.3, 0.2, 0.1];
    let p = ProxyEstimator::new(ideal, w).unwrap();
    let f = FeatureTuple::new(80.0, 50.0, 0.2, 7.5);
    let want = (-(0.4 * 0.2 + 0.3 * 0.25 + 0.0 + 0.1 * 0.5f64)).exp();
    assert!((p.score(&f) - want).abs() < 1e-12);
    assert_eq!(p.score(&ideal), 1.0);
    let img = scene_frame();
    let mut p = p;
    let e = p.estimate(&img).unwrap();
    assert_eq!(e.value, p.score(&extract_features(&img)));
    assert_eq!(e.class_label, None);
}

#[test]
fn oracle_label_follows_detector() {
    let img = scene_frame();
    let gt = &img.tag().unwrap().gt;
    for response in [
        QualityResponse::Constant { value: 1.0 },
        QualityResponse::Constant { value: 0.5 },
        QualityResponse::Constant { value: 0.0 },
    ] {
        let det = Arc::new(SyntheticDetector::new(response).unwrap());
        let r = evaluate(&det.detect(&img).unwrap(), gt, DEFAULT_IOU_THRESHOLD);
        let want = detection_label(r.map, r.mean_tp_iou).unwrap();
        let got = OracleEstimator::new(det).estimate(&img).unwrap();
        assert_eq!(got.class_label, Some(want));
    }
    let perfect = Arc::new(SyntheticDetector::new(QualityResponse::Constant { value: 1.0 }).unwrap());
    assert_eq!(OracleEstimator::new(perfect.clone()).estimate(&img).unwrap().value, 1.0);
    let untagged = ImageBuffer::filled(16, 16, [0, 0, 0]).unwrap();
    assert!(matches!(
        OracleEstimator::new(perfect).estimate(&untagged),
        Err(EstimatorError::MissingGroundTruth)
    ));
}

struct Fixed(f64);

impl QualityEstimator for Fixed {
    fn name(&self) -> &str {
        "fixed"
    }

    fn estimate(&mut self, _: &ImageBuffer) -> Result<QualityEstimate, EstimatorError> {
        Ok(QualityEstimate::from_value(self.0))
    }
}

#[test]
fn all_drop_gate_passes_every_sixth_frame() {
    let mut gate = AquaGate::new(Box::new(Fixed(0.1)), 0.5, 5).unwrap();
    let img = ImageBuffer::filled(4, 4, [9, 9, 9]).unwrap();
    let passed: Vec<usize> = (0..1000).filter(|_| gate.admit(&img).passed()).collect();
    let want: Vec<usize> = (0..1000).filter(|i| i % 6 == 5).collect();
    assert_eq!(passed, want);
}

#[test]
fn gate_counter_resets_on_good_frame() {
    let mut gate = AquaGate::new(Box::new(Fixed(0.0)), 0.5, 3).unwrap();
    let good = Some(QualityEstimate::from_value(0.9));
    let bad = Some(QualityEstimate::from_value(0.1));
    let seq = [bad, bad, good, bad, bad, bad, bad, None];
    let got: Vec<bool> = seq.iter().map(|e| gate.decide(*e).passed()).collect();
    assert_eq!(got, [false, false, true, false, false, false, true, false]);
    assert_eq!(gate.consecutive_drops(), 1);
    assert!(matches!(gate.decide(good), GateDecision::Pass(_)));
}

// Replies `value <mean red / 255>` per framed PNG; closes after `limit`
// requests per connection.
fn serve(limit: usize, delay: Duration) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            for _ in 0..limit {
                let mut len = [0u8; 4];
                if reader.read_exact(&mut len).is_err() {
                    break;
                }
                let mut png = vec![0u8; u32::from_be_bytes(len) as usize];
                reader.read_exact(&mut png).unwrap();
                let img = decode_png(&png).unwrap();
                let red = img.pixels().map(|p| p[0] as f64).sum::<f64>() / (img.width() * img.height()) as f64;
                thread::sleep(delay);
                if writeln!(stream, "value {}", red / 255.0).is_err() {
                    break;
                }
            }
        }
    });
    addr
}

#[test]
fn external_estimator_over_tcp() {
    let addr = serve(2, Duration::ZERO);
    let mut est = ExternalEstimator::new(Transport::Tcp { addr }, Duration::from_secs(5));
    for v in [0u8, 51, 255, 102] {
        let img = ImageBuffer::filled(8, 8, [v, 0, 0]).unwrap();
        let e = est.estimate(&img);
        // The server hangs up after two frames; the estimator reconnects.
        let e = e.or_else(|_| est.estimate(&img)).unwrap();
        assert!((e.value - v as f64 / 255.0).abs() < 1e-12);
    }
}

#[test]
fn external_estimator_times_out() {
    let addr = serve(10, Duration::from_millis(500));
    let mut est = ExternalEstimator::new(Transport::Tcp { addr }, Duration::from_millis(50));
    let img = ImageBuffer::filled(8, 8, [1, 2, 3]).unwrap();
    assert!(matches!(est.estimate(&img), Err(EstimatorError::Timeout)));
}

#[test]
fn external_estimator_unreachable() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    drop(listener);
    let mut est = ExternalEstimator::new(Transport::Tcp { addr }, Duration::from_millis(200));
    let img = ImageBuffer::filled(8, 8, [1, 2, 3]).unwrap();
    assert!(matches!(est.estimate(&img), Err(EstimatorError::Unavailable(_))));
    let mut missing = ExternalEstimator::new(
        Transport::Stdio {
            program: "/nonexistent/estimator".into(),
            args: vec![],
        },
        Duration::from_millis(200),
    );
    assert!(matches!(missing.estimate(&img), Err(EstimatorError::Unavailable(_))));
}

#[test]
fn registry_builds_each_builtin() {
    let reg = EstimatorRegistry::with_builtins();
    let settings = EstimatorSettings {
        response: Some(QualityResponse::Constant { value: 1.0 }),
        ideal: Some(FeatureTuple::new(100.0, 30.0, 0.2, 5.0)),
        transport: Some(Transport::Tcp {
            addr: "127.0.0.1:9".into(),
        }),
        ..Default::default()
    };
    for name in ["oracle", "proxy", "external"] {
        assert_eq!(reg.create(name, &settings).unwrap().name(), name);
    }
    assert!(reg.create("oracle", &EstimatorSettings::default()).is_err());
    assert!(reg.create("external", &EstimatorSettings::default()).is_err());
    let mut custom = EstimatorRegistry::empty();
    custom.register("half", |_| Ok(Box::new(Fixed(0.5))));
    let img = ImageBuffer::filled(2, 2, [0, 0, 0]).unwrap();
    assert_eq!(custom.create("half", &settings).unwrap().estimate(&img).unwrap().value, 0.5);
    let json = serde_json::to_string(&settings).unwrap();
    let back: EstimatorSettings = serde_json::from_str(&json).unwrap();
    assert_eq!(back, settings);
}
