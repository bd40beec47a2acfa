use serde::{Deserialize, Serialize};

use super::{DriftDetector, DriftLevel, DriftSignal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EddmConfig {
    pub min_errors: usize,
    pub warning_ratio: f64,
    pub drift_ratio: f64,
}

impl Default for EddmConfig {
    fn default() -> Self {
        EddmConfig {
            min_errors: 30,
            warning_ratio: 0.95,
            drift_ratio: 0.90,
        }
    }
}

/// Distance-between-errors monitor. Keeps the mean `m` and standard deviation
/// `s` of the gaps between consecutive errors and compares `m + 2s` against
/// its running maximum; a shrinking ratio means errors are getting denser.
/// Levels only change when an error arrives.
#[derive(Debug, Clone)]
pub struct Eddm {
    config: EddmConfig,
    seen: usize,
    last_error: Option<usize>,
    errors: usize,
    gaps: usize,
    mean: f64,
    m2: f64,
    max_m2s: f64,
    level: DriftLevel,
}

impl Eddm {
    pub fn new(config: EddmConfig) -> Result<Self> {
        if !(0.0 < config.drift_ratio && config.drift_ratio < config.warning_ratio && config.warning_ratio <= 1.0) {
            return Err(Error::param("eddm needs 0 < drift_ratio < warning_ratio <= 1"));
        }
        Ok(Eddm {
            config,
            seen: 0,
            last_error: None,
            errors: 0,
            gaps: 0,
            mean: 0.0,
            m2: 0.0,
            max_m2s: 0.0,
            level: DriftLevel::InControl,
        })
    }

    pub fn errors(&self) -> usize {
        self.errors
    }

    pub fn mean_gap(&self) -> f64 {
        self.mean
    }
}

impl Default for Eddm {
    fn default() -> Self {
        Eddm::new(EddmConfig::default()).expect("default config is valid")
    }
}

impl DriftDetector for Eddm {
    /// `value` is 1 for a misclassification and 0 otherwise.
    fn update(&mut self, value: f64) -> Result<DriftSignal> {
        if value != 0.0 && value != 1.0 {
            return Err(Error::param(format!("eddm expects 0/1 errors, got {value}")));
        }
        let index = self.seen;
        self.seen += 1;
        if value == 0.0 {
            return Ok(DriftSignal { level: self.level, index });
        }
        self.errors += 1;
        let previous = self.last_error.replace(index);
        let Some(previous) = previous else {
            return Ok(DriftSignal { level: self.level, index });
        };
        let gap = (index - previous) as f64;
        self.gaps += 1;
        let delta = gap - self.mean;
        self.mean += delta / self.gaps as f64;
        self.m2 += delta * (gap - self.mean);
        let std = (self.m2 / self.gaps as f64).sqrt();
        let m2s = self.mean + 2.0 * std;
        if self.errors < self.config.min_errors {
            self.max_m2s = self.max_m2s.max(m2s);
            return Ok(DriftSignal { level: self.level, index });
        }
        if m2s > self.max_m2s {
            self.max_m2s = m2s;
            self.level = DriftLevel::InControl;
        } else {
            let ratio = m2s / self.max_m2s;
            self.level = if ratio < self.config.drift_ratio {
                DriftLevel::Drift
            } else if ratio < self.config.warning_ratio {
                DriftLevel::Warning
            } else {
                DriftLevel::InControl
            };
        }
        let level = self.level;
        if level == DriftLevel::Drift {
            self.reset();
        }
        Ok(DriftSignal { level, index })
    }

    fn reset(&mut self) {
        self.last_error = None;
        self.errors = 0;
        self.gaps = 0;
        self.mean = 0.0;
        self.m2 = 0.0;
        self.max_m2s = 0.0;
        self.level = DriftLevel::InControl;
    }

    fn encode(&self, correct: bool) -> f64 {
        (!correct) as u8 as f64
    }

    fn memory_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
    }

    fn name(&self) -> &'static str {
        "eddm"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_errors_never_signals() {
        let mut d = Eddm::default();
        for _ in 0..5000 {
            assert_eq!(d.update(0.0).unwrap().level, DriftLevel::InControl);
        }
    }

    #[test]
    fn widening_gaps_stay_in_control() {
        let mut d = Eddm::default();
        let mut gap = 2;
        let mut next = 0;
        for i in 0..20_000 {
            let err = if i == next {
                next += gap;
                gap += 1;
                1.0
            } else {
                0.0
            };
            assert_eq!(d.update(err).unwrap().level, DriftLevel::InControl, "at {i}");
        }
    }

    #[test]
    fn needs_min_errors() {
        let mut d = Eddm::default();
        // dense errors after sparse ones, but fewer than 30 errors in total
        for i in 0..200 {
            d.update((i % 10 == 0) as u8 as f64).unwrap();
        }
        for _ in 0..8 {
            assert_eq!(d.update(1.0).unwrap().level, DriftLevel::InControl);
        }
    }
}
