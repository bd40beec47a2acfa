use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{DriftDetector, DriftLevel, DriftSignal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdwinConfig {
    pub delta: f64,
    /// Buckets kept per level before the two oldest are merged.
    pub max_buckets: usize,
    /// Cut checks run every `clock` insertions.
    pub clock: usize,
    /// Smallest subwindow considered by the cut test.
    pub min_window: usize,
}

impl Default for AdwinConfig {
    fn default() -> Self {
        AdwinConfig {
            delta: 0.002,
            max_buckets: 5,
            clock: 32,
            min_window: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bucket {
    total: f64,
    variance: f64,
}

/// Adaptive window over values in `[0, 1]`, stored as an exponential
/// histogram: level `k` holds buckets summarising `2^k` consecutive values.
/// Whenever two adjacent subwindows have means differing by more than the
/// variance-based bound, the older part is dropped.
#[derive(Debug, Clone)]
pub struct Adwin {
    config: AdwinConfig,
    /// `levels[k]` is ordered oldest first; higher levels are older.
    levels: Vec<VecDeque<Bucket>>,
    width: usize,
    total: f64,
    variance: f64,
    seen: usize,
}

impl Adwin {
    pub fn new(config: AdwinConfig) -> Result<Self> {
        if !(config.delta > 0.0 && config.delta < 1.0) {
            return Err(Error::param(format!("adwin delta {} not in (0, 1)", config.delta)));
        }
        if config.max_buckets < 2 || config.clock == 0 || config.min_window == 0 {
            return Err(Error::param("adwin needs max_buckets >= 2, clock >= 1, min_window >= 1"));
        }
        Ok(Adwin {
            config,
            levels: Vec::new(),
            width: 0,
            total: 0.0,
            variance: 0.0,
            seen: 0,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.total / self.width as f64
        }
    }

    /// Population variance of the retained window.
    pub fn variance(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.variance / self.width as f64
        }
    }

    pub fn bucket_count(&self) -> usize {
        self.levels.iter().map(VecDeque::len).sum()
    }

    /// Inserts a value without running the cut test.
    pub fn insert(&mut self, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::param(format!("adwin value {value} outside [0, 1]")));
        }
        if self.width > 0 {
            let mean = self.total / self.width as f64;
            self.variance += self.width as f64 * (value - mean).powi(2) / (self.width + 1) as f64;
        }
        self.width += 1;
        self.total += value;
        if self.levels.is_empty() {
            self.levels.push(VecDeque::new());
        }
        self.levels[0].push_back(Bucket {
            total: value,
            variance: 0.0,
        });
        self.compress();
        Ok(())
    }

    fn compress(&mut self) {
        let mut k = 0;
        while k < self.levels.len() {
            if self.levels[k].len() <= self.config.max_buckets {
                break;
            }
            let size = (1u64 << k) as f64;
            let a = self.levels[k].pop_front().expect("level over capacity");
            let b = self.levels[k].pop_front().expect("level over capacity");
            let diff = a.total / size - b.total / size;
            let merged = Bucket {
                total: a.total + b.total,
                variance: a.variance + b.variance + size * size * diff * diff / (2.0 * size),
            };
            if k + 1 == self.levels.len() {
                self.levels.push(VecDeque::new());
            }
            self.levels[k + 1].push_back(merged);
            k += 1;
        }
    }

    fn drop_oldest(&mut self) {
        let Some(k) = self.levels.iter().rposition(|l| !l.is_empty()) else {
            return;
        };
        let bucket = self.levels[k].pop_front().expect("non-empty level");
        if self.levels[k].is_empty() && k + 1 == self.levels.len() {
            self.levels.pop();
        }
        let n1 = (1usize << k) as f64;
        self.width -= 1 << k;
        self.total -= bucket.total;
        if self.width == 0 {
            self.total = 0.0;
            self.variance = 0.0;
            return;
        }
        let w = self.width as f64;
        let u1 = bucket.total / n1;
        let rest = self.total / w;
        self.variance -= bucket.variance + n1 * w * (u1 - rest).powi(2) / (n1 + w);
        self.variance = self.variance.max(0.0);
    }

    /// Scans the bucket boundaries from the oldest end and reports whether
    /// some split violates the bound.
    fn should_cut(&self) -> bool {
        let n = self.width as f64;
        let min = self.config.min_window;
        let dd = (2.0 * n.ln() / self.config.delta).ln();
        let var = self.variance();
        let (mut n0, mut s0) = (0usize, 0.0);
        for k in (0..self.levels.len()).rev() {
            for b in &self.levels[k] {
                n0 += 1 << k;
                s0 += b.total;
                let n1 = self.width - n0;
                if n1 <= min + 1 {
                    return false;
                }
                if n0 <= min + 1 {
                    continue;
                }
                let s1 = self.total - s0;
                let diff = s0 / n0 as f64 - s1 / n1 as f64;
                let m = 1.0 / (n0 - min + 1) as f64 + 1.0 / (n1 - min + 1) as f64;
                let eps = (2.0 * m * var * dd).sqrt() + 2.0 / 3.0 * dd * m;
                if diff.abs() > eps {
                    return true;
                }
            }
        }
        false
    }
}

impl Default for Adwin {
    fn default() -> Self {
        Adwin::new(AdwinConfig::default()).expect("default config is valid")
    }
}

impl DriftDetector for Adwin {
    fn update(&mut self, value: f64) -> Result<DriftSignal> {
        self.insert(value)?;
        let index = self.seen;
        self.seen += 1;
        let mut cut = false;
        if self.seen.is_multiple_of(self.config.clock) && self.width > 2 * self.config.min_window {
            while self.should_cut() {
                self.drop_oldest();
                cut = true;
            }
        }
        let level = if cut { DriftLevel::Drift } else { DriftLevel::InControl };
        Ok(DriftSignal { level, index })
    }

    fn reset(&mut self) {
        self.levels.clear();
        self.width = 0;
        self.total = 0.0;
        self.variance = 0.0;
    }

    fn encode(&self, correct: bool) -> f64 {
        correct as u8 as f64
    }

    fn memory_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self.levels.len() * std::mem::size_of::<VecDeque<Bucket>>()
            + self.bucket_count() * std::mem::size_of::<Bucket>()
    }

    fn name(&self) -> &'static str {
        "adwin"
    }
}
