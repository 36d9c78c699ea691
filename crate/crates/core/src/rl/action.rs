use std::fmt;
use std::str::FromStr;

use super::RlError;
use crate::imaging::Knob;

/// Move one knob one lattice step, or do nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    NoOp,
    Increase(Knob),
    Decrease(Knob),
}

impl Action {
    /// Fixed action order; argmax ties resolve to the earliest entry.
    pub const ALL: [Action; 9] = [
        Action::NoOp,
        Action::Increase(Knob::Brightness),
        Action::Decrease(Knob::Brightness),
        Action::Increase(Knob::Contrast),
        Action::Decrease(Knob::Contrast),
        Action::Increase(Knob::ColorSaturation),
        Action::Decrease(Knob::ColorSaturation),
        Action::Increase(Knob::Sharpness),
        Action::Decrease(Knob::Sharpness),
    ];

    pub fn index(self) -> usize {
        match self {
            Action::NoOp => 0,
            Action::Increase(k) => 1 + 2 * k.index(),
            Action::Decrease(k) => 2 + 2 * k.index(),
        }
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }

    /// The opposite move on the same knob.
    pub fn revert(self) -> Action {
        match self {
            Action::NoOp => Action::NoOp,
            Action::Increase(k) => Action::Decrease(k),
            Action::Decrease(k) => Action::Increase(k),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::NoOp => f.write_str("noop"),
            Action::Increase(k) => write!(f, "inc_{}", k.name()),
            Action::Decrease(k) => write!(f, "dec_{}", k.name()),
        }
    }
}

impl FromStr for Action {
    type Err = RlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "noop" {
            return Ok(Action::NoOp);
        }
        let bad = || RlError::Parse(format!("unknown action `{s}`"));
        let (dir, knob) = s.split_once('_').ok_or_else(bad)?;
        let knob: Knob = knob.parse().map_err(|_| bad())?;
        match dir {
            "inc" => Ok(Action::Increase(knob)),
            "dec" => Ok(Action::Decrease(knob)),
            _ => Err(bad()),
        }
    }
}
