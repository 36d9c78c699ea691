use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::DetEvalError;

/// Axis-aligned box in pixel coordinates. `score` is only set on detections.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    #[serde(rename = "class", default)]
    pub class_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl BoundingBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64, class_id: u32) -> Result<Self, DetEvalError> {
        let b = Self {
            x1,
            y1,
            x2,
            y2,
            class_id,
            score: None,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn validate(&self) -> Result<(), DetEvalError> {
        let finite = [self.x1, self.y1, self.x2, self.y2].iter().all(|v| v.is_finite());
        if !finite || self.x1 >= self.x2 || self.y1 >= self.y2 {
            return Err(DetEvalError::InvalidBox(*self));
        }
        if let Some(s) = self.score {
            if !(0.0..=1.0).contains(&s) {
                return Err(DetEvalError::InvalidBox(*self));
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        (self.x2 - self.x1) * (self.y2 - self.y1)
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }
}

/// Intersection over union of two boxes, in [0, 1]. Class ids are ignored.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let ih = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// One line of a ground-truth or detection JSON-lines file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBoxes {
    pub frame_id: String,
    pub boxes: Vec<BoundingBox>,
}

pub fn read_jsonl(reader: impl BufRead) -> Result<BTreeMap<String, Vec<BoundingBox>>, DetEvalError> {
    let mut out = BTreeMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: FrameBoxes =
            serde_json::from_str(&line).map_err(|e| DetEvalError::Parse(lineno + 1, e.to_string()))?;
        for b in &rec.boxes {
            b.validate()?;
        }
        out.insert(rec.frame_id, rec.boxes);
    }
    Ok(out)
}

pub fn write_jsonl<'a>(
    mut writer: impl Write,
    records: impl IntoIterator<Item = (&'a str, &'a [BoundingBox])>,
) -> Result<(), DetEvalError> {
    for (frame_id, boxes) in records {
        let rec = FrameBoxes {
            frame_id: frame_id.to_string(),
            boxes: boxes.to_vec(),
        };
        serde_json::to_writer(&mut writer, &rec).map_err(|e| DetEvalError::Parse(0, e.to_string()))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
