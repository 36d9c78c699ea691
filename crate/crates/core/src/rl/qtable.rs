use std::collections::BTreeMap;

use super::{Action, RlError, StateKey};

/// Sparse action values; unseen pairs read as 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QTable {
    values: BTreeMap<StateKey, [f64; 9]>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: &StateKey, a: Action) -> f64 {
        self.values.get(s).map_or(0.0, |row| row[a.index()])
    }

    pub fn set(&mut self, s: StateKey, a: Action, v: f64) -> Result<(), RlError> {
        if !v.is_finite() {
            return Err(RlError::NonFinite(v));
        }
        self.values.entry(s).or_insert([0.0; 9])[a.index()] = v;
        Ok(())
    }

    /// Best action in `s`; ties go to the earliest action in [`Action::ALL`].
    pub fn argmax(&self, s: &StateKey) -> Action {
        let Some(row) = self.values.get(s) else {
            return Action::ALL[0];
        };
        let mut best = 0;
        for i in 1..row.len() {
            if row[i] > row[best] {
                best = i;
            }
        }
        Action::ALL[best]
    }

    pub fn states(&self) -> usize {
        self.values.len()
    }

    /// `{state_key: {action: value}}`
    pub fn to_json(&self) -> Result<String, RlError> {
        let doc: BTreeMap<String, BTreeMap<String, f64>> = self
            .values
            .iter()
            .map(|(s, row)| {
                let actions = Action::ALL.iter().map(|a| (a.to_string(), row[a.index()])).collect();
                (s.to_string(), actions)
            })
            .collect();
        serde_json::to_string_pretty(&doc).map_err(|e| RlError::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, RlError> {
        let doc: BTreeMap<String, BTreeMap<String, f64>> =
            serde_json::from_str(text).map_err(|e| RlError::Parse(e.to_string()))?;
        let mut q = Self::new();
        for (s, actions) in doc {
            let key: StateKey = s.parse()?;
            for (a, v) in actions {
                q.set(key, a.parse()?, v)?;
            }
        }
        Ok(q)
    }
}
