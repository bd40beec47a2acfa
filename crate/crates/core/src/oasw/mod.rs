//! Sliding-window drift detection with adaptive-window retraining.
//!
//! Every labelled sample is first scored by the current model, then its
//! correctness flag joins a history from which two consecutive windows of
//! size `t` are compared: the window ending at the current position and the
//! one ending `t` samples earlier. Relative drops below `alpha` (warning) and
//! `beta` (drift) drive a Normal → Warning → Drift → Normal state machine.
//! Samples arriving after the warning are collected in an adaptive window of
//! at most `t_prime_max` samples; the model is refit on that window when the
//! drift is confirmed and again once the new concept has been observed long
//! enough.

mod engine;
mod ring;

pub use engine::{OaswEngine, StepOutcome};
pub use ring::CorrectnessRing;

use serde::{Deserialize, Serialize};

use crate::classifier::{GbdtLearner, GbdtModel};
use crate::error::{Error, Result};
use crate::eval::{prequential_evaluate, EvaluationReport};
use crate::stream::StreamSource;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OaswParams {
    /// Warning threshold on the ratio of current to previous window accuracy.
    pub alpha: f64,
    /// Drift threshold; must be below `alpha`.
    pub beta: f64,
    /// Sliding window size.
    pub t: usize,
    /// Adaptive window capacity.
    pub t_prime_max: usize,
}

impl OaswParams {
    /// Tuned preset for the IoTID20 anomaly stream.
    pub fn iotid20() -> Self {
        OaswParams {
            alpha: 0.999,
            beta: 0.990,
            t: 300,
            t_prime_max: 1000,
        }
    }

    /// Tuned preset for the reduced NSL-KDD stream.
    pub fn nsl_kdd() -> Self {
        OaswParams {
            alpha: 0.978,
            beta: 0.954,
            t: 350,
            t_prime_max: 3100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < self.alpha && self.alpha < 1.0) {
            return Err(Error::param(format!(
                "thresholds need 0 < beta < alpha < 1 (alpha={}, beta={})",
                self.alpha, self.beta
            )));
        }
        if self.t < 2 {
            return Err(Error::param(format!("window size t={} must be >= 2", self.t)));
        }
        if self.t_prime_max < self.t {
            return Err(Error::param(format!(
                "t_prime_max={} must be >= t={}",
                self.t_prime_max, self.t
            )));
        }
        Ok(())
    }
}

impl Default for OaswParams {
    fn default() -> Self {
        OaswParams {
            alpha: 0.975,
            beta: 0.95,
            t: 300,
            t_prime_max: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DriftState {
    Normal,
    Warning,
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    WarningEntered,
    FalseAlarm,
    DriftDetected,
    RetrainedOnDrift,
    StabilizationRetrain,
    WindowReleased,
}

/// One entry of an adaptation event log. Detectors that do not track window
/// accuracies leave the accuracy fields empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub index: usize,
    pub acc_now: Option<f64>,
    pub acc_ref: Option<f64>,
}

/// Result of replaying a stream through the engine.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Mean of all correctness flags, warm-up included.
    pub avg_accuracy: f64,
    pub report: EvaluationReport,
}

/// Prequentially replays `stream` through an engine seeded with `model`;
/// retraining reuses the model's own hyperparameters.
pub fn run_stream(model: GbdtModel, stream: &StreamSource, params: &OaswParams) -> Result<RunOutcome> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let learner = GbdtLearner::new(model.params.clone());
    let mut engine = OaswEngine::new(*params, learner, model)?;
    let report = prequential_evaluate(&mut engine, &stream.replay())?;
    if let Some(msg) = &report.aborted {
        return Err(Error::param(format!("stream replay aborted: {msg}")));
    }
    Ok(RunOutcome {
        avg_accuracy: report.metrics.accuracy,
        report,
    })
}
