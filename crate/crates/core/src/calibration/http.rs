use std::time::Duration;

use serde::{Deserialize, Serialize};
use ureq::Agent;

use super::{CalibrationError, CameraDevice};
use crate::imaging::{decode_png, CameraParams, ImageBuffer, Knob};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetMethod {
    #[default]
    Get,
    Put,
}

/// URL templates for a camera reachable over plain HTTP. `{name}` expands
/// to the parameter name (`brightness`, `contrast`, `color_saturation`,
/// `sharpness`) and `{value}` to the 0..=100 setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HttpCameraConfig {
    pub set_url: String,
    #[serde(default)]
    pub set_method: SetMethod,
    /// Must answer with the integer value as the whole body.
    pub get_url: String,
    /// Must answer with a PNG image.
    pub capture_url: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_timeout_ms() -> u64 {
    5_000
}

pub struct HttpCamera {
    config: HttpCameraConfig,
    agent: Agent,
}

fn expand(template: &str, knob: Knob, value: Option<u8>) -> String {
    let url = template.replace("{name}", knob.name());
    match value {
        Some(v) => url.replace("{value}", &v.to_string()),
        None => url,
    }
}

fn device_err(e: impl std::fmt::Display) -> CalibrationError {
    CalibrationError::Device(e.to_string())
}

impl HttpCamera {
    pub fn new(config: HttpCameraConfig) -> Self {
        let agent = Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .build()
            .new_agent();
        Self { config, agent }
    }
}

impl CameraDevice for HttpCamera {
    fn set_param(&mut self, knob: Knob, value: u8) -> Result<(), CalibrationError> {
        if value > CameraParams::MAX {
            return Err(CalibrationError::CameraValue(value as u32));
        }
        let url = expand(&self.config.set_url, knob, Some(value));
        match self.config.set_method {
            SetMethod::Get => self.agent.get(&url).call(),
            SetMethod::Put => self.agent.put(&url).send_empty(),
        }
        .map_err(device_err)?;
        Ok(())
    }

    fn get_param(&mut self, knob: Knob) -> Result<u8, CalibrationError> {
        let url = expand(&self.config.get_url, knob, None);
        let body = self
            .agent
            .get(&url)
            .call()
            .and_then(|mut r| r.body_mut().read_to_string())
            .map_err(device_err)?;
        let v: u32 = body
            .trim()
            .parse()
            .map_err(|_| CalibrationError::Device(format!("bad parameter value `{}`", body.trim())))?;
        if v > CameraParams::MAX as u32 {
            return Err(CalibrationError::CameraValue(v));
        }
        Ok(v as u8)
    }

    fn capture(&mut self) -> Result<ImageBuffer, CalibrationError> {
        let bytes = self
            .agent
            .get(&self.config.capture_url)
            .call()
            .and_then(|mut r| r.body_mut().read_to_vec())
            .map_err(device_err)?;
        Ok(decode_png(&bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_expand() {
        assert_eq!(
            expand("http://cam/set?{name}={value}", Knob::ColorSaturation, Some(30)),
            "http://cam/set?color_saturation=30"
        );
        assert_eq!(expand("http://cam/{name}", Knob::Sharpness, None), "http://cam/sharpness");
    }
}
