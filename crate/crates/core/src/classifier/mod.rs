//! Retrainable classifier contract and the built-in gradient-boosted
//! decision tree learner.

mod goss;
mod model;
mod params;
mod tree;

pub use goss::{goss_subsample, GossSample};
pub use model::{GbdtModel, MODEL_FORMAT_VERSION};
pub use params::ClassifierParams;
pub use tree::{Node, Tree};

use crate::error::Result;
use crate::stream::LabeledSample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub class: u8,
    /// Probability of class 1, strictly inside (0, 1).
    pub probability: f64,
}

/// A fitted, immutable scoring model.
pub trait Classifier: Send + Sync {
    fn predict(&self, features: &[f64]) -> Result<Prediction>;

    /// Deterministic structural size in bytes (not allocator-exact).
    fn memory_bytes(&self) -> usize;
}

/// Builds fresh models from labelled samples. Fitting never mutates a
/// previous model.
pub trait Learner: Send + Sync {
    type Model: Classifier;

    fn fit(&self, samples: &[LabeledSample]) -> Result<Self::Model>;

    /// Smallest training set worth fitting on; retraining on fewer samples
    /// is postponed by adaptive pipelines.
    fn min_retrain_samples(&self) -> usize {
        10
    }
}

/// [`Learner`] producing [`GbdtModel`]s with fixed hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GbdtLearner {
    pub params: ClassifierParams,
}

impl GbdtLearner {
    pub fn new(params: ClassifierParams) -> Self {
        GbdtLearner { params }
    }
}

impl Learner for GbdtLearner {
    type Model = GbdtModel;

    fn fit(&self, samples: &[LabeledSample]) -> Result<GbdtModel> {
        GbdtModel::fit(samples, &self.params)
    }

    fn min_retrain_samples(&self) -> usize {
        (2 * self.params.min_data_in_leaf).max(10)
    }
}
