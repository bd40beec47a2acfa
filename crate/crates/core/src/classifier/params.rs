use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters of the boosted-tree learner. The first five are the
/// tunable ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub num_leaves: usize,
    pub min_data_in_leaf: usize,
    #[serde(default)]
    pub goss_enabled: bool,
    #[serde(default = "default_goss_top")]
    pub goss_top_fraction: f64,
    #[serde(default = "default_goss_rand")]
    pub goss_rand_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_goss_top() -> f64 {
    0.2
}
fn default_goss_rand() -> f64 {
    0.1
}

/// L2 penalty added to the hessian sum of every leaf.
pub(crate) const LEAF_L2: f64 = 1.0;

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            n_estimators: 100,
            max_depth: 8,
            learning_rate: 0.1,
            num_leaves: 31,
            min_data_in_leaf: 20,
            goss_enabled: false,
            goss_top_fraction: default_goss_top(),
            goss_rand_fraction: default_goss_rand(),
            seed: 0,
        }
    }
}

impl ClassifierParams {
    /// Tuned preset for the IoTID20 anomaly stream.
    pub fn iotid20() -> Self {
        ClassifierParams {
            n_estimators: 300,
            max_depth: 40,
            learning_rate: 0.56,
            num_leaves: 200,
            min_data_in_leaf: 35,
            ..Default::default()
        }
    }

    /// Tuned preset for the reduced NSL-KDD stream.
    pub fn nsl_kdd() -> Self {
        ClassifierParams {
            n_estimators: 300,
            max_depth: 42,
            learning_rate: 0.81,
            num_leaves: 100,
            min_data_in_leaf: 45,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if self.n_estimators < 1 {
            return bad("n_estimators must be >= 1".into());
        }
        if self.max_depth < 1 {
            return bad("max_depth must be >= 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return bad(format!("learning_rate {} not in (0, 1)", self.learning_rate));
        }
        if self.num_leaves < 2 {
            return bad("num_leaves must be >= 2".into());
        }
        if self.min_data_in_leaf < 1 {
            return bad("min_data_in_leaf must be >= 1".into());
        }
        let (a, b) = (self.goss_top_fraction, self.goss_rand_fraction);
        if self.goss_enabled && !(a > 0.0 && b > 0.0 && a + b <= 1.0) {
            return bad(format!("GOSS fractions a={a}, b={b} need a, b > 0 and a + b <= 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ClassifierParams::default().validate().is_ok());
        assert!(ClassifierParams::iotid20().validate().is_ok());
        assert!(ClassifierParams::nsl_kdd().validate().is_ok());
        let mut p = ClassifierParams::default();
        p.learning_rate = 1.0;
        assert!(p.validate().is_err());
        p.learning_rate = 0.5;
        p.num_leaves = 1;
        assert!(p.validate().is_err());
        p.num_leaves = 2;
        p.goss_enabled = true;
        p.goss_top_fraction = 0.7;
        p.goss_rand_fraction = 0.4;
        assert!(p.validate().is_err());
    }
}
