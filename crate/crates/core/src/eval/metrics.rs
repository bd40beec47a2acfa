use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary confusion counts; class 1 (attack/anomaly) is the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, label: u8, prediction: u8) {
        match (label, prediction) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (1, _) => self.fn_ += 1,
            _ => self.tn += 1,
        }
    }

    pub fn from_trace(labels: &[u8], predictions: &[u8]) -> Self {
        let mut c = ConfusionCounts::default();
        for (&l, &p) in labels.iter().zip(predictions) {
            c.record(l, p);
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Ratios in `[0, 1]`. A ratio whose denominator is zero is stored as 0 and
/// its `*_defined` flag is false.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_defined: bool,
    pub recall_defined: bool,
    pub f1_defined: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, false)
    } else {
        (num as f64 / den as f64, true)
    }
}

pub fn compute_metrics(counts: &ConfusionCounts) -> Result<Metrics> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyStream);
    }
    let accuracy = (counts.tp + counts.tn) as f64 / total as f64;
    let (precision, precision_defined) = ratio(counts.tp, counts.tp + counts.fp);
    let (recall, recall_defined) = ratio(counts.tp, counts.tp + counts.fn_);
    let (f1, f1_defined) = if precision + recall > 0.0 {
        (2.0 * precision * recall / (precision + recall), true)
    } else {
        (0.0, false)
    };
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
        precision_defined,
        recall_defined,
        f1_defined,
    })
}
