use std::mem;

use super::ring::CorrectnessRing;
use super::{DriftState, Event, EventKind, OaswParams};
use crate::classifier::{Classifier, Learner};
use crate::error::{Error, Result};
use crate::eval::{sample_bytes, AdaptivePipeline};
use crate::stream::LabeledSample;

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub prediction: u8,
    pub events: Vec<Event>,
}

/// Online drift detector and adapter wrapping a retrainable classifier.
///
/// The first `2t` samples are a warm-up: they are scored and recorded but no
/// detection runs until both comparison windows are complete.
pub struct OaswEngine<L: Learner> {
    params: OaswParams,
    learner: L,
    model: L::Model,
    ring: CorrectnessRing,
    adaptive: Vec<LabeledSample>,
    state: DriftState,
    drift_point: Option<usize>,
    baseline: Option<f64>,
    retrain_pending: bool,
    pending_prediction: Option<u8>,
    last_window_accuracy: Option<f64>,
    retrains: usize,
    model_bytes: usize,
    adaptive_bytes: usize,
}

impl<L: Learner> OaswEngine<L> {
    pub fn new(params: OaswParams, learner: L, model: L::Model) -> Result<Self> {
        params.validate()?;
        Ok(OaswEngine {
            ring: CorrectnessRing::new(2 * params.t),
            adaptive: Vec::with_capacity(params.t_prime_max),
            params,
            learner,
            state: DriftState::Normal,
            drift_point: None,
            baseline: None,
            retrain_pending: false,
            pending_prediction: None,
            last_window_accuracy: None,
            retrains: 0,
            model_bytes: model.memory_bytes(),
            adaptive_bytes: 0,
            model,
        })
    }

    pub fn params(&self) -> &OaswParams {
        &self.params
    }

    pub fn state(&self) -> DriftState {
        self.state
    }

    pub fn model(&self) -> &L::Model {
        &self.model
    }

    pub fn adaptive_window(&self) -> &[LabeledSample] {
        &self.adaptive
    }

    pub fn drift_point(&self) -> Option<usize> {
        self.drift_point
    }

    pub fn retrain_count(&self) -> usize {
        self.retrains
    }

    /// Correctness flags plus adaptive-window samples currently held.
    pub fn live_samples(&self) -> usize {
        self.ring.len() + self.adaptive.len()
    }

    /// Number of samples processed so far.
    pub fn position(&self) -> usize {
        self.ring.pushed()
    }

    /// Structural size of the engine itself, excluding model and buffers.
    pub fn fixed_overhead() -> usize {
        mem::size_of::<Self>()
    }

    /// Scores `sample`, then reveals its label and runs one detection step.
    pub fn step(&mut self, sample: &LabeledSample) -> Result<StepOutcome> {
        let prediction = self.model.predict(&sample.features)?.class;
        let events = self.observe(sample, prediction)?;
        Ok(StepOutcome { prediction, events })
    }

    fn retrain(&mut self) -> Result<()> {
        self.model = self.learner.fit(&self.adaptive)?;
        self.model_bytes = self.model.memory_bytes();
        self.retrains += 1;
        Ok(())
    }

    fn collect(&mut self, sample: &LabeledSample) {
        self.adaptive_bytes += sample_bytes(sample);
        self.adaptive.push(sample.clone());
    }

    fn release(&mut self) {
        self.adaptive.clear();
        self.adaptive_bytes = 0;
    }

    fn observe(&mut self, sample: &LabeledSample, prediction: u8) -> Result<Vec<Event>> {
        let i = self.ring.pushed();
        self.ring.push(prediction == sample.label);
        let t = self.params.t;
        let mut events = Vec::new();
        if i < 2 * t {
            return Ok(events);
        }
        let now = self
            .ring
            .window_accuracy(i, t)
            .expect("ring retains 2t flags");
        let reference = self
            .ring
            .window_accuracy(i - t, t)
            .expect("ring retains 2t flags");
        self.last_window_accuracy = Some(now);
        let (alpha, beta, cap) = (self.params.alpha, self.params.beta, self.params.t_prime_max);
        let event = |kind, acc_ref: f64| Event {
            kind,
            index: i,
            acc_now: Some(now),
            acc_ref: Some(acc_ref),
        };

        // the adaptive window is a set: a sample joins it at most once per step
        let mut collected_now = false;
        if self.state == DriftState::Normal && now < alpha * reference {
            self.collect(sample);
            collected_now = true;
            self.state = DriftState::Warning;
            events.push(event(EventKind::WarningEntered, reference));
        }

        if self.state == DriftState::Warning {
            let collected = self.adaptive.len();
            if now < beta * reference {
                self.state = DriftState::Drift;
                self.drift_point = Some(i);
                self.baseline = None;
                events.push(event(EventKind::DriftDetected, reference));
                if collected >= self.learner.min_retrain_samples() {
                    self.retrain()?;
                    events.push(event(EventKind::RetrainedOnDrift, reference));
                } else {
                    self.retrain_pending = true;
                }
            } else if now >= alpha * reference || collected == cap {
                self.release();
                self.state = DriftState::Normal;
                events.push(event(EventKind::FalseAlarm, reference));
                events.push(event(EventKind::WindowReleased, reference));
            } else if !collected_now {
                self.collect(sample);
                collected_now = true;
            }
        }

        if self.state == DriftState::Drift {
            let f = self.drift_point.expect("drift point set on entering Drift");
            if i == f + t {
                self.baseline = Some(now);
            }
            let collected = self.adaptive.len();
            let degraded = self.baseline.is_some_and(|b| now < alpha * b);
            if degraded || collected == cap {
                let acc_ref = self.baseline.unwrap_or(reference);
                self.retrain()?;
                self.retrain_pending = false;
                self.release();
                self.state = DriftState::Normal;
                self.drift_point = None;
                self.baseline = None;
                events.push(event(EventKind::StabilizationRetrain, acc_ref));
                events.push(event(EventKind::WindowReleased, acc_ref));
            } else {
                if !collected_now {
                    self.collect(sample);
                }
                if self.retrain_pending && self.adaptive.len() >= self.learner.min_retrain_samples() {
                    self.retrain()?;
                    self.retrain_pending = false;
                    events.push(event(EventKind::RetrainedOnDrift, reference));
                }
            }
        }
        Ok(events)
    }
}

impl<L: Learner> AdaptivePipeline for OaswEngine<L> {
    fn predict(&mut self, features: &[f64]) -> Result<u8> {
        let class = self.model.predict(features)?.class;
        self.pending_prediction = Some(class);
        Ok(class)
    }

    fn learn(&mut self, sample: &LabeledSample) -> Result<Vec<Event>> {
        let prediction = self
            .pending_prediction
            .take()
            .ok_or_else(|| Error::param("learn called without a preceding predict"))?;
        self.observe(sample, prediction)
    }

    fn window_accuracy(&self) -> Option<f64> {
        self.last_window_accuracy
    }

    fn memory_proxy(&self) -> usize {
        Self::fixed_overhead()
            + self.model_bytes
            + self.ring.len() * mem::size_of::<u64>()
            + self.adaptive_bytes
    }

    fn method(&self) -> String {
        "oasw".to_string()
    }
}
