use serde::{Deserialize, Serialize};

use super::{DriftDetector, DriftLevel, DriftSignal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DdmConfig {
    pub min_instances: usize,
    pub warning_level: f64,
    pub drift_level: f64,
}

impl Default for DdmConfig {
    fn default() -> Self {
        DdmConfig {
            min_instances: 30,
            warning_level: 2.0,
            drift_level: 3.0,
        }
    }
}

/// Error-rate monitor: tracks the running error rate `p` and its binomial
/// standard deviation `s`, remembers the point where `p + s` was smallest, and
/// signals when `p + s` exceeds that minimum by 2 (warning) or 3 (drift)
/// standard deviations. Resets itself after a drift.
#[derive(Debug, Clone)]
pub struct Ddm {
    config: DdmConfig,
    seen: usize,
    n: usize,
    p: f64,
    p_min: f64,
    s_min: f64,
}

impl Ddm {
    pub fn new(config: DdmConfig) -> Result<Self> {
        if !(config.warning_level > 0.0 && config.drift_level > config.warning_level) {
            return Err(Error::param("ddm needs 0 < warning_level < drift_level"));
        }
        Ok(Ddm {
            config,
            seen: 0,
            n: 0,
            p: 0.0,
            p_min: f64::INFINITY,
            s_min: f64::INFINITY,
        })
    }

    pub fn error_rate(&self) -> f64 {
        self.p
    }

    pub fn samples(&self) -> usize {
        self.n
    }
}

impl Default for Ddm {
    fn default() -> Self {
        Ddm::new(DdmConfig::default()).expect("default config is valid")
    }
}

impl DriftDetector for Ddm {
    /// `value` is 1 for a misclassification and 0 otherwise.
    fn update(&mut self, value: f64) -> Result<DriftSignal> {
        if value != 0.0 && value != 1.0 {
            return Err(Error::param(format!("ddm expects 0/1 errors, got {value}")));
        }
        let index = self.seen;
        self.seen += 1;
        self.n += 1;
        self.p += (value - self.p) / self.n as f64;
        let s = (self.p * (1.0 - self.p) / self.n as f64).sqrt();
        if self.n < self.config.min_instances {
            return Ok(DriftSignal::in_control(index));
        }
        // with s = 0 the minimum would collapse to p and flag the first error
        if s > 0.0 && self.p + s <= self.p_min + self.s_min {
            self.p_min = self.p;
            self.s_min = s;
        }
        let level = if self.p + s > self.p_min + self.config.drift_level * self.s_min {
            self.reset();
            DriftLevel::Drift
        } else if self.p + s > self.p_min + self.config.warning_level * self.s_min {
            DriftLevel::Warning
        } else {
            DriftLevel::InControl
        };
        Ok(DriftSignal { level, index })
    }

    fn reset(&mut self) {
        self.n = 0;
        self.p = 0.0;
        self.p_min = f64::INFINITY;
        self.s_min = f64::INFINITY;
    }

    fn encode(&self, correct: bool) -> f64 {
        (!correct) as u8 as f64
    }

    fn memory_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
    }

    fn name(&self) -> &'static str {
        "ddm"
    }
}
