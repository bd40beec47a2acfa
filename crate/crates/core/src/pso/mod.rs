//! Particle swarm search over bounded mixed integer/real spaces, and the
//! tuning loops built on it.

mod space;
mod swarm;
mod tune;

pub use space::{Dim, DimKind, HyperParamSpace, OPEN_BOUND_EPS};
pub use swarm::{pso_maximize, write_trace, Evaluation, Particle, PsoConfig, PsoResult};
pub use tune::{
    classifier_params_from, fold_accuracy, forward_folds, oasw_params_from, tune_classifier, tune_oasw,
    ClassifierTuning, OaswTuning, CLASSIFIER_DIMS, OASW_DIMS,
};
