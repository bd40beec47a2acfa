use std::mem;

use serde::{Deserialize, Serialize};

use super::goss::goss_with_rng;
use super::params::ClassifierParams;
use super::tree::{grow_tree, Columns, Node, Tree, TreeLimits};
use super::{Classifier, Prediction};
use crate::error::{Error, Result};
use crate::stream::LabeledSample;
use crate::util::rng;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Log-odds are clamped to this magnitude before the logistic map so the
/// probability stays strictly inside (0, 1).
const MAX_LOG_ODDS: f64 = 30.0;
/// Bound on the class prior used for the initial score.
const PRIOR_EPS: f64 = 1e-6;

/// Binary gradient-boosted tree ensemble with logistic loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbdtModel {
    pub format_version: u32,
    pub base_score: f64,
    pub schema_width: usize,
    pub params: ClassifierParams,
    pub trees: Vec<Tree>,
}

fn sigmoid(z: f64) -> f64 {
    let z = z.clamp(-MAX_LOG_ODDS, MAX_LOG_ODDS);
    1.0 / (1.0 + (-z).exp())
}

fn log_loss(raw: &[f64], labels: &[f64]) -> f64 {
    let total: f64 = raw
        .iter()
        .zip(labels)
        .map(|(&z, &y)| {
            // log(1 + e^z) - y z, computed stably
            let softplus = if z > 0.0 {
                z + (-z).exp().ln_1p()
            } else {
                z.exp().ln_1p()
            };
            softplus - y * z
        })
        .sum();
    total / raw.len() as f64
}

impl GbdtModel {
    /// A model with no trees that predicts `sigmoid(base_score)` everywhere.
    pub fn prior_only(base_score: f64, schema_width: usize, params: ClassifierParams) -> Self {
        GbdtModel {
            format_version: MODEL_FORMAT_VERSION,
            base_score,
            schema_width,
            params,
            trees: Vec::new(),
        }
    }

    pub fn fit(samples: &[LabeledSample], params: &ClassifierParams) -> Result<Self> {
        Self::fit_with_loss_trace(samples, params).map(|(m, _)| m)
    }

    /// Fits a fresh model and returns the mean training log-loss after each
    /// boosting round.
    pub fn fit_with_loss_trace(
        samples: &[LabeledSample],
        params: &ClassifierParams,
    ) -> Result<(Self, Vec<f64>)> {
        params.validate()?;
        let first = samples.first().ok_or(Error::EmptyStream)?;
        let width = first.features.len();
        if width == 0 {
            return Err(Error::Schema("samples have no features".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.features.len() != width) {
            return Err(Error::WidthMismatch {
                expected: width,
                actual: bad.features.len(),
            });
        }
        let n = samples.len();
        let labels: Vec<f64> = samples.iter().map(|s| f64::from(s.label.min(1))).collect();
        let prior = (labels.iter().sum::<f64>() / n as f64).clamp(PRIOR_EPS, 1.0 - PRIOR_EPS);
        let base_score = (prior / (1.0 - prior)).ln();

        let rows: Vec<&[f64]> = samples.iter().map(|s| s.features.as_slice()).collect();
        let data = Columns::new(&rows, width);
        let limits = TreeLimits {
            max_depth: params.max_depth,
            num_leaves: params.num_leaves,
            min_data_in_leaf: params.min_data_in_leaf,
        };
        let mut rng = rng(params.seed);
        let mut raw = vec![base_score; n];
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        let mut weight = vec![1.0; n];
        let mut trees = Vec::with_capacity(params.n_estimators);
        let mut losses = Vec::with_capacity(params.n_estimators);

        for _ in 0..params.n_estimators {
            for i in 0..n {
                let p = sigmoid(raw[i]);
                grad[i] = p - labels[i];
                hess[i] = (p * (1.0 - p)).max(1e-16);
            }
            if params.goss_enabled {
                let pick = goss_with_rng(
                    &grad,
                    params.goss_top_fraction,
                    params.goss_rand_fraction,
                    &mut rng,
                )?;
                weight.iter_mut().for_each(|w| *w = 0.0);
                for (&i, &w) in pick.indices.iter().zip(&pick.weights) {
                    weight[i] = w;
                }
            }
            let tree = grow_tree(&data, &grad, &hess, &weight, &limits);
            for (i, row) in rows.iter().enumerate() {
                raw[i] += params.learning_rate * tree.leaf_value(row);
            }
            losses.push(log_loss(&raw, &labels));
            trees.push(tree);
        }

        Ok((
            GbdtModel {
                format_version: MODEL_FORMAT_VERSION,
                base_score,
                schema_width: width,
                params: params.clone(),
                trees,
            },
            losses,
        ))
    }

    fn check_width(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.schema_width {
            return Err(Error::WidthMismatch {
                expected: self.schema_width,
                actual: features.len(),
            });
        }
        Ok(())
    }

    /// Raw ensemble score in log-odds space (unclamped).
    pub fn raw_score(&self, features: &[f64]) -> Result<f64> {
        self.check_width(features)?;
        let sum: f64 = self.trees.iter().map(|t| t.leaf_value(features)).sum();
        Ok(self.base_score + self.params.learning_rate * sum)
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        let probability = sigmoid(self.raw_score(features)?);
        Ok(Prediction {
            class: (probability >= 0.5) as u8,
            probability,
        })
    }

    pub fn predict_batch<'a>(
        &self,
        rows: impl IntoIterator<Item = &'a [f64]>,
    ) -> Result<Vec<Prediction>> {
        rows.into_iter().map(|r| self.predict(r)).collect()
    }

    pub fn node_count(&self) -> usize {
        self.trees.iter().map(|t| t.nodes.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialisation is infallible")
    }

    /// Parses and structurally validates a model document.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: GbdtModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Model(m));
        if self.format_version != MODEL_FORMAT_VERSION {
            return bad(format!(
                "unsupported format_version {} (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            ));
        }
        if !self.base_score.is_finite() {
            return bad("base_score is not finite".into());
        }
        if self.schema_width == 0 {
            return bad("schema_width must be positive".into());
        }
        self.params
            .validate()
            .map_err(|e| Error::Model(e.to_string()))?;
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.nodes.is_empty() {
                return bad(format!("tree {t} has no nodes"));
            }
            for (i, node) in tree.nodes.iter().enumerate() {
                match *node {
                    Node::Leaf { value, .. } if !value.is_finite() => {
                        return bad(format!("tree {t} node {i}: non-finite leaf value"))
                    }
                    Node::Leaf { .. } => {}
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        if feature >= self.schema_width {
                            return bad(format!("tree {t} node {i}: feature {feature} out of range"));
                        }
                        if !threshold.is_finite() {
                            return bad(format!("tree {t} node {i}: non-finite threshold"));
                        }
                        let n = tree.nodes.len();
                        if left <= i || right <= i || left >= n || right >= n || left == right {
                            return bad(format!("tree {t} node {i}: invalid child indices"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl Classifier for GbdtModel {
    fn predict(&self, features: &[f64]) -> Result<Prediction> {
        GbdtModel::predict(self, features)
    }

    fn memory_bytes(&self) -> usize {
        mem::size_of::<Self>()
            + self.trees.len() * mem::size_of::<Tree>()
            + self.node_count() * Node::size_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(rows: &[(&[f64], u8)]) -> Vec<LabeledSample> {
        rows.iter()
            .enumerate()
            .map(|(i, (f, y))| LabeledSample {
                index: i,
                features: f.to_vec(),
                label: *y,
            })
            .collect()
    }

    #[test]
    fn constant_label_predicts_that_label() {
        let data = samples(&[(&[0.0, 1.0], 1), (&[2.0, 3.0], 1), (&[5.0, -1.0], 1)]);
        let m = GbdtModel::fit(&data, &ClassifierParams::default()).unwrap();
        for x in [[0.0, 0.0], [100.0, -100.0], [-3.0, 7.5]] {
            assert_eq!(m.predict(&x).unwrap().class, 1);
        }
        let data = samples(&[(&[0.0], 0), (&[1.0], 0)]);
        let m = GbdtModel::fit(&data, &ClassifierParams::default()).unwrap();
        assert_eq!(m.predict(&[0.5]).unwrap().class, 0);
    }

    #[test]
    fn prior_only_balanced_is_half() {
        let m = GbdtModel::prior_only(0.0, 3, ClassifierParams::default());
        let p = m.predict(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.probability, 0.5);
        assert_eq!(p.class, 1);
    }

    #[test]
    fn xor_is_learned() {
        let data = samples(&[
            (&[0.0, 0.0], 0),
            (&[0.0, 1.0], 1),
            (&[1.0, 0.0], 1),
            (&[1.0, 1.0], 0),
        ]);
        let params = ClassifierParams {
            n_estimators: 20,
            max_depth: 3,
            learning_rate: 0.3,
            min_data_in_leaf: 1,
            ..Default::default()
        };
        let m = GbdtModel::fit(&data, &params).unwrap();
        for s in &data {
            assert_eq!(m.predict(&s.features).unwrap().class, s.label, "{:?}", s.features);
        }
    }

    #[test]
    fn width_errors() {
        let m = GbdtModel::prior_only(0.0, 2, ClassifierParams::default());
        assert!(matches!(m.predict(&[1.0]), Err(Error::WidthMismatch { expected: 2, actual: 1 })));
        let data = samples(&[(&[0.0, 0.0], 0), (&[0.0], 1)]);
        assert!(GbdtModel::fit(&data, &ClassifierParams::default()).is_err());
        assert!(matches!(
            GbdtModel::fit(&[], &ClassifierParams::default()),
            Err(Error::EmptyStream)
        ));
    }

    #[test]
    fn probability_stays_open() {
        let mut m = GbdtModel::prior_only(1e6, 1, ClassifierParams::default());
        let p = m.predict(&[0.0]).unwrap().probability;
        assert!(p < 1.0 && p > 0.0);
        m.base_score = -1e6;
        let p = m.predict(&[0.0]).unwrap().probability;
        assert!(p < 1.0 && p > 0.0);
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let data = samples(&[(&[0.0], 0), (&[1.0], 1), (&[2.0], 1), (&[-1.0], 0)]);
        let params = ClassifierParams {
            n_estimators: 3,
            min_data_in_leaf: 1,
            ..Default::default()
        };
        let m = GbdtModel::fit(&data, &params).unwrap();
        let back = GbdtModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);

        let mut v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        v["format_version"] = 2.into();
        assert!(GbdtModel::from_json(&v.to_string()).is_err());

        let mut cyclic = m.clone();
        cyclic.trees[0].nodes[0] = Node::Split {
            feature: 0,
            threshold: 0.5,
            left: 0,
            right: 0,
        };
        assert!(GbdtModel::from_json(&cyclic.to_json()).is_err());
        assert!(GbdtModel::from_json("{").is_err());
    }
}
