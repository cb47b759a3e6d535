//! Per-effect run configuration, read from JSON:
//!
//! ```json
//! { "latency_ms": { "fetch": 100 },
//!   "behavior":   { "fetch": { "kind": "value", "payload": "ok" },
//!                   "ask":   { "kind": "absent" } } }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{ConstKind, Signature};
use crate::semantics::Behavior;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config mentions `{0}`, which is not a declared effect")]
    UnknownEffect(String),
    #[error("latency for `{name}` must be a finite number >= 0, got {value}")]
    BadLatency { name: String, value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum BehaviorSpec {
    Value(String),
    Absent,
    StateIncr(i64),
    Log(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectBehaviorConfig {
    #[serde(default)]
    pub latency_ms: BTreeMap<String, f64>,
    #[serde(default)]
    pub behavior: BTreeMap<String, BehaviorSpec>,
}

impl EffectBehaviorConfig {
    pub fn from_json(s: &str) -> Result<EffectBehaviorConfig, ConfigError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<EffectBehaviorConfig, ConfigError> {
        EffectBehaviorConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks names against the program's effects and latencies for range.
    pub fn validate(&self, sig: &Signature) -> Result<(), ConfigError> {
        let is_effect = |n: &str| matches!(sig.get(n), Some(d) if d.kind == ConstKind::Effectful);
        for name in self.latency_ms.keys().chain(self.behavior.keys()) {
            if !is_effect(name) {
                return Err(ConfigError::UnknownEffect(name.clone()));
            }
        }
        for (name, &value) in &self.latency_ms {
            if !value.is_finite() || value < 0.0 {
                return Err(ConfigError::BadLatency {
                    name: name.clone(),
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn behaviors(&self) -> BTreeMap<String, Behavior> {
        self.behavior
            .iter()
            .map(|(n, b)| {
                let b = match b {
                    BehaviorSpec::Value(v) => Behavior::Value(v.clone()),
                    BehaviorSpec::Absent => Behavior::Absent,
                    BehaviorSpec::StateIncr(k) => Behavior::StateIncr(*k),
                    BehaviorSpec::Log(l) => Behavior::Log(l.clone()),
                };
                (n.clone(), b)
            })
            .collect()
    }

    /// Latency of every effect in `sig`, falling back to `default`. Effects
    /// nested in another effect's result share its latency.
    pub fn latencies(&self, sig: &Signature, default: f64) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for d in sig.iter().filter(|d| d.kind == ConstKind::Effectful) {
            let ms = self.latency_ms.get(&d.name).copied().unwrap_or(default);
            let mut name = d.name.clone();
            for _ in 0..4 {
                out.insert(name.clone(), ms);
                name.push_str(".inner");
            }
        }
        out
    }
}
