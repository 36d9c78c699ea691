use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::VcamError;

pub const SECONDS_PER_DAY: u32 = 86_400;
pub const INTERVAL_SECONDS: u32 = 900;
pub const INTERVALS_PER_DAY: usize = (SECONDS_PER_DAY / INTERVAL_SECONDS) as usize;

/// Seconds since midnight, `0..86400`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeOfDay(u32);

impl TimeOfDay {
    pub fn from_seconds(secs: u32) -> Result<Self, VcamError> {
        if secs >= SECONDS_PER_DAY {
            return Err(VcamError::Time(format!("{secs} seconds is past midnight")));
        }
        Ok(Self(secs))
    }

    pub fn from_hms(h: u32, m: u32, s: u32) -> Result<Self, VcamError> {
        if h > 23 || m > 59 || s > 59 {
            return Err(VcamError::Time(format!("{h:02}:{m:02}:{s:02}")));
        }
        Ok(Self(h * 3600 + m * 60 + s))
    }

    /// Start of the 15-minute interval `index`.
    pub fn interval_start(index: usize) -> Result<Self, VcamError> {
        if index >= INTERVALS_PER_DAY {
            return Err(VcamError::Time(format!("interval {index} out of range")));
        }
        Ok(Self(index as u32 * INTERVAL_SECONDS))
    }

    pub fn seconds(self) -> u32 {
        self.0
    }

    pub fn interval(self) -> usize {
        (self.0 / INTERVAL_SECONDS) as usize
    }

    pub fn hms(self) -> (u32, u32, u32) {
        (self.0 / 3600, (self.0 / 60) % 60, self.0 % 60)
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, m, s) = self.hms();
        if s == 0 {
            write!(f, "{h:02}:{m:02}")
        } else {
            write!(f, "{h:02}:{m:02}:{s:02}")
        }
    }
}

/// Accepts `HH:MM`, `HH:MM:SS` and the compact `HHMMSS` used in file names.
impl FromStr for TimeOfDay {
    type Err = VcamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VcamError::Time(s.to_string());
        let parts: Vec<u32> = if s.contains(':') {
            s.split(':').map(|p| p.parse().map_err(|_| bad())).collect::<Result<_, _>>()?
        } else if s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit()) {
            (0..3).map(|i| s[2 * i..2 * i + 2].parse().unwrap()).collect()
        } else {
            return Err(bad());
        };
        match parts.as_slice() {
            [h, m] => Self::from_hms(*h, *m, 0),
            [h, m, sec] => Self::from_hms(*h, *m, *sec),
            _ => Err(bad()),
        }
    }
}

pub fn frame_file_name(time: TimeOfDay, seq: u32, ext: &str) -> String {
    let (h, m, s) = time.hms();
    format!("frame_{h:02}{m:02}{s:02}_{seq}.{ext}")
}

/// Parses `frame_<HHMMSS>_<seq>.<ext>`; `None` for anything else.
pub fn parse_frame_file_name(name: &str) -> Option<(TimeOfDay, u32)> {
    let stem = name.rsplit_once('.').map_or(name, |(stem, _)| stem);
    let rest = stem.strip_prefix("frame_")?;
    let (hms, seq) = rest.split_once('_')?;
    if hms.len() != 6 {
        return None;
    }
    let time = hms.parse().ok()?;
    Some((time, seq.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals() {
        assert_eq!(TimeOfDay::from_hms(0, 14, 59).unwrap().interval(), 0);
        assert_eq!(TimeOfDay::from_hms(0, 15, 0).unwrap().interval(), 1);
        assert_eq!("12:00".parse::<TimeOfDay>().unwrap().interval(), 48);
        assert_eq!("23:59:59".parse::<TimeOfDay>().unwrap().interval(), 95);
        assert!("24:00".parse::<TimeOfDay>().is_err());
        assert!("noon".parse::<TimeOfDay>().is_err());
    }

    #[test]
    fn file_names_round_trip() {
        let t = TimeOfDay::from_hms(20, 5, 9).unwrap();
        let name = frame_file_name(t, 17, "png");
        assert_eq!(name, "frame_200509_17.png");
        assert_eq!(parse_frame_file_name(&name), Some((t, 17)));
        assert_eq!(parse_frame_file_name("gt.jsonl"), None);
        assert_eq!(parse_frame_file_name("frame_2005_1.png"), None);
    }

    #[test]
    fn display() {
        assert_eq!(TimeOfDay::interval_start(80).unwrap().to_string(), "20:00");
        assert_eq!(TimeOfDay::from_seconds(45).unwrap().to_string(), "00:00:45");
    }
}
