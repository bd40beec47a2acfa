use super::space::HyperParamSpace;
use super::swarm::{pso_maximize, PsoConfig, PsoResult};
use crate::classifier::{ClassifierParams, GbdtModel};
use crate::error::{Error, Result};
use crate::eval::ConfusionCounts;
use crate::oasw::{run_stream, OaswParams};
use crate::stream::{LabeledSample, StreamSource};
use crate::util::ceil_fraction;

pub const OASW_DIMS: [&str; 4] = ["alpha", "beta", "t", "t_prime_max"];
pub const CLASSIFIER_DIMS: [&str; 5] = [
    "n_estimators",
    "max_depth",
    "learning_rate",
    "num_leaves",
    "min_data_in_leaf",
];

fn value(space: &HyperParamSpace, config: &[f64], name: &str) -> f64 {
    config[space.position_of(name).expect("dimension checked by require")]
}

/// Turns a decoded configuration into engine parameters. A `beta` at or above
/// `alpha` is mapped linearly from its own range into the part below `alpha`;
/// a `t_prime_max` below `t` is raised to `t`.
pub fn oasw_params_from(space: &HyperParamSpace, config: &[f64]) -> Result<OaswParams> {
    space.require(&OASW_DIMS)?;
    let alpha = value(space, config, "alpha");
    let mut beta = value(space, config, "beta");
    if beta >= alpha {
        let dim = &space.dims[space.position_of("beta").expect("checked")];
        let (lo, hi) = dim.effective_bounds();
        if alpha <= lo {
            return Err(Error::param(format!(
                "alpha={alpha} leaves no room for beta in [{lo}, {hi}]"
            )));
        }
        let frac = if hi > lo { (beta - lo) / (hi - lo) } else { 0.5 };
        beta = lo + frac * (alpha - lo);
        if beta >= alpha {
            beta = lo + 0.5 * (alpha - lo);
        }
    }
    let t = value(space, config, "t") as usize;
    let t_prime_max = (value(space, config, "t_prime_max") as usize).max(t);
    let params = OaswParams {
        alpha,
        beta,
        t,
        t_prime_max,
    };
    params.validate()?;
    Ok(params)
}

/// Overrides the five tunables of `base` with a decoded configuration.
pub fn classifier_params_from(space: &HyperParamSpace, config: &[f64], base: &ClassifierParams) -> Result<ClassifierParams> {
    space.require(&CLASSIFIER_DIMS)?;
    let params = ClassifierParams {
        n_estimators: value(space, config, "n_estimators") as usize,
        max_depth: value(space, config, "max_depth") as usize,
        learning_rate: value(space, config, "learning_rate"),
        num_leaves: value(space, config, "num_leaves") as usize,
        min_data_in_leaf: value(space, config, "min_data_in_leaf") as usize,
        ..base.clone()
    };
    params.validate()?;
    Ok(params)
}

#[derive(Debug, Clone)]
pub struct OaswTuning {
    pub params: OaswParams,
    /// Average prequential accuracy of `params` on the tuning stream.
    pub accuracy: f64,
    pub search: PsoResult,
}

/// Searches engine parameters maximising average prequential accuracy.
///
/// With `tune_fraction = None` every candidate is scored on the whole stream,
/// so the returned accuracy is an in-sample figure for that same stream. A
/// fraction in `(0, 1]` scores candidates on that leading share only.
pub fn tune_oasw(
    stream: &StreamSource,
    offline_model: &GbdtModel,
    space: &HyperParamSpace,
    config: &PsoConfig,
    tune_fraction: Option<f64>,
) -> Result<OaswTuning> {
    space.require(&OASW_DIMS)?;
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let tuning = match tune_fraction {
        None => {
            log::warn!("tuning on the full evaluation stream; reported accuracy is in-sample");
            stream.replay()
        }
        Some(f) if f > 0.0 && f <= 1.0 => stream.slice(0..ceil_fraction(f, stream.len()).max(1)),
        Some(f) => return Err(Error::param(format!("tune_fraction {f} not in (0, 1]"))),
    };
    let objective = |c: &[f64]| -> Result<f64> {
        let params = oasw_params_from(space, c)?;
        Ok(run_stream(offline_model.clone(), &tuning.replay(), &params)?.avg_accuracy)
    };
    let search = pso_maximize(space, objective, config)?;
    let params = oasw_params_from(space, &search.best_position)?;
    Ok(OaswTuning {
        params,
        accuracy: search.best_score,
        search,
    })
}

#[derive(Debug, Clone)]
pub struct ClassifierTuning {
    pub params: ClassifierParams,
    /// Mean validation accuracy over the folds.
    pub accuracy: f64,
    pub search: PsoResult,
}

/// `folds` forward-chaining splits: the samples are cut into `folds + 1`
/// consecutive blocks and split `k` trains on blocks `0..=k` and validates
/// on block `k + 1`.
pub fn forward_folds(n: usize, folds: usize) -> Vec<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    let blocks = folds + 1;
    let cut = |k: usize| k * n / blocks;
    (0..folds).map(|k| (0..cut(k + 1), cut(k + 1)..cut(k + 2))).collect()
}

/// Mean accuracy of `params` over [`forward_folds`].
pub fn fold_accuracy(samples: &[LabeledSample], params: &ClassifierParams, folds: usize) -> Result<f64> {
    let mut total = 0.0;
    for (train, valid) in forward_folds(samples.len(), folds) {
        let model = GbdtModel::fit(&samples[train], params)?;
        let mut counts = ConfusionCounts::default();
        for s in &samples[valid] {
            counts.record(s.label, model.predict(&s.features)?.class);
        }
        total += (counts.tp + counts.tn) as f64 / counts.total().max(1) as f64;
    }
    Ok(total / folds as f64)
}

/// Searches the five tree hyperparameters on the offline samples; other
/// fields are copied from `base`.
pub fn tune_classifier(
    offline: &[LabeledSample],
    space: &HyperParamSpace,
    config: &PsoConfig,
    folds: usize,
    base: &ClassifierParams,
) -> Result<ClassifierTuning> {
    space.require(&CLASSIFIER_DIMS)?;
    if folds == 0 {
        return Err(Error::param("folds must be >= 1"));
    }
    let min_leaf = space.dims[space.position_of("min_data_in_leaf").expect("checked")]
        .high
        .floor() as usize;
    if offline.len() < (folds + 1) * min_leaf.max(1) {
        return Err(Error::param(format!(
            "{} offline samples are too few for {folds} folds with min_data_in_leaf up to {min_leaf}",
            offline.len()
        )));
    }
    let objective = |c: &[f64]| -> Result<f64> {
        let params = classifier_params_from(space, c, base)?;
        fold_accuracy(offline, &params, folds)
    };
    let search = pso_maximize(space, objective, config)?;
    let params = classifier_params_from(space, &search.best_position, base)?;
    Ok(ClassifierTuning {
        params,
        accuracy: search.best_score,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_repair_stays_below_alpha_and_in_range() {
        let space = HyperParamSpace::oasw_ranges();
        for (a, b) in [(0.96, 0.99), (0.96, 0.96), (0.999, 0.999999), (0.950001, 0.95)] {
            let p = oasw_params_from(&space, &[a, b, 300.0, 1000.0]).unwrap();
            assert!(p.beta < p.alpha, "{a} {b} -> {}", p.beta);
            assert!(p.beta > 0.90);
        }
        let p = oasw_params_from(&space, &[0.97, 0.93, 300.0, 1000.0]).unwrap();
        assert_eq!(p.beta, 0.93);
    }

    #[test]
    fn t_prime_max_raised_to_t() {
        let space = HyperParamSpace::oasw_ranges();
        let p = oasw_params_from(&space, &[0.98, 0.95, 900.0, 600.0]).unwrap();
        assert_eq!(p.t_prime_max, 900);
    }

    #[test]
    fn folds_chain_forward() {
        let f = forward_folds(100, 4);
        assert_eq!(f, vec![(0..20, 20..40), (0..40, 40..60), (0..60, 60..80), (0..80, 80..100)]);
    }

    #[test]
    fn too_little_offline_data() {
        let space = HyperParamSpace::classifier_ranges();
        let samples: Vec<LabeledSample> = (0..100)
            .map(|i| LabeledSample {
                index: i,
                features: vec![i as f64],
                label: (i % 2) as u8,
            })
            .collect();
        let cfg = PsoConfig {
            swarm_size: 2,
            max_evaluations: 2,
            ..Default::default()
        };
        assert!(tune_classifier(&samples, &space, &cfg, 3, &ClassifierParams::default()).is_err());
    }
}
