use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::space::HyperParamSpace;
use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Per-dimension velocity limit as a fraction of the dimension's range.
    pub velocity_clamp_fraction: f64,
    /// Total objective evaluations.
    pub max_evaluations: usize,
    pub seed: u64,
    /// Worker threads for evaluating one iteration; 1 runs inline.
    pub jobs: usize,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm_size: 20,
            inertia: 0.7298,
            cognitive: 1.4962,
            social: 1.4962,
            velocity_clamp_fraction: 0.2,
            max_evaluations: 1000,
            seed: 0,
            jobs: 1,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::param("swarm_size must be >= 2"));
        }
        if self.max_evaluations < self.swarm_size {
            return Err(Error::param(format!(
                "max_evaluations={} must be >= swarm_size={}",
                self.max_evaluations, self.swarm_size
            )));
        }
        if self.velocity_clamp_fraction.is_nan() || self.velocity_clamp_fraction <= 0.0 || ![self.inertia, self.cognitive, self.social].iter().all(|c| c.is_finite() && *c >= 0.0) {
            return Err(Error::param("pso coefficients must be finite and non-negative, clamp positive"));
        }
        if self.jobs == 0 {
            return Err(Error::param("jobs must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_score: f64,
}

impl Particle {
    /// Applies one velocity and position update towards `global_best`,
    /// drawing `r1`, `r2` per dimension.
    pub fn advance(&mut self, global_best: &[f64], space: &HyperParamSpace, cfg: &PsoConfig, rng: &mut ChaCha8Rng) {
        for (k, dim) in space.dims.iter().enumerate() {
            let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
            let vmax = cfg.velocity_clamp_fraction * dim.range();
            let x = self.position[k];
            let v = cfg.inertia * self.velocity[k]
                + cfg.cognitive * r1 * (self.best_position[k] - x)
                + cfg.social * r2 * (global_best[k] - x);
            self.velocity[k] = v.clamp(-vmax, vmax);
            self.position[k] = dim.clamp(x + self.velocity[k]);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub index: usize,
    /// Decoded configuration that was scored.
    pub config: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    /// Decoded best configuration.
    pub best_position: Vec<f64>,
    pub best_score: f64,
    /// Best score seen after each evaluation.
    pub history: Vec<f64>,
    pub evaluations: Vec<Evaluation>,
}

fn score_of(r: Result<f64>) -> f64 {
    match r {
        Ok(s) if !s.is_nan() => s,
        Ok(_) => f64::NEG_INFINITY,
        Err(e) => {
            log::warn!("objective failed: {e}");
            f64::NEG_INFINITY
        }
    }
}

/// Synchronous particle swarm maximising `objective` over `space`. Exactly
/// `max_evaluations` configurations are scored; failures and NaN count as
/// negative infinity. Results depend only on the inputs and the seed, not on
/// `jobs`.
pub fn pso_maximize<F>(space: &HyperParamSpace, objective: F, cfg: &PsoConfig) -> Result<PsoResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    space.validate()?;
    cfg.validate()?;
    let mut rng = rng(cfg.seed);
    let mut swarm: Vec<Particle> = (0..cfg.swarm_size)
        .map(|_| {
            let mut position = Vec::with_capacity(space.len());
            let mut velocity = Vec::with_capacity(space.len());
            for d in &space.dims {
                let (lo, hi) = d.effective_bounds();
                position.push(if lo < hi { rng.gen_range(lo..=hi) } else { lo });
                let vmax = cfg.velocity_clamp_fraction * d.range();
                velocity.push(rng.gen_range(-vmax..=vmax));
            }
            Particle {
                best_position: position.clone(),
                position,
                velocity,
                best_score: f64::NEG_INFINITY,
            }
        })
        .collect();

    let pool = if cfg.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.jobs)
                .build()
                .map_err(|e| Error::param(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let mut evaluations: Vec<Evaluation> = Vec::with_capacity(cfg.max_evaluations);
    let mut history = Vec::with_capacity(cfg.max_evaluations);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut global_best = swarm[0].position.clone();
    let mut iteration = 0;

    while evaluations.len() < cfg.max_evaluations {
        let take = (cfg.max_evaluations - evaluations.len()).min(swarm.len());
        let configs: Vec<Vec<f64>> = swarm[..take].iter().map(|p| space.decode(&p.position)).collect();
        let scores: Vec<f64> = match &pool {
            Some(pool) => pool.install(|| configs.par_iter().map(|c| score_of(objective(c))).collect()),
            None => configs.iter().map(|c| score_of(objective(c))).collect(),
        };
        for (k, (config, score)) in configs.into_iter().zip(scores).enumerate() {
            let p = &mut swarm[k];
            if score > p.best_score {
                p.best_score = score;
                p.best_position = p.position.clone();
            }
            if best.as_ref().is_none_or(|(_, b)| score > *b) {
                best = Some((config.clone(), score));
                global_best = p.position.clone();
            }
            history.push(best.as_ref().map_or(f64::NEG_INFINITY, |b| b.1));
            evaluations.push(Evaluation {
                index: evaluations.len(),
                config,
                score,
            });
        }
        iteration += 1;
        log::debug!(
            "pso iteration {iteration}: {} evaluations, best {}",
            evaluations.len(),
            history.last().copied().unwrap_or(f64::NEG_INFINITY)
        );
        if evaluations.len() < cfg.max_evaluations {
            for p in swarm.iter_mut() {
                p.advance(&global_best, space, cfg, &mut rng);
            }
        }
    }

    let (best_position, best_score) = best.expect("at least one evaluation");
    Ok(PsoResult {
        best_position,
        best_score,
        history,
        evaluations,
    })
}

/// Writes `evaluation_index,<dims...>,score` rows.
pub fn write_trace<W: std::io::Write>(out: W, space: &HyperParamSpace, result: &PsoResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["evaluation_index".to_string()];
    header.extend(space.names().map(str::to_string));
    header.push("score".to_string());
    w.write_record(&header)?;
    for e in &result.evaluations {
        let mut row = vec![e.index.to_string()];
        row.extend(e.config.iter().map(f64::to_string));
        row.push(e.score.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}
