use std::mem;

use super::{sample_bytes, AdaptivePipeline};
use crate::classifier::{Classifier, Learner};
use crate::error::Result;
use crate::oasw::{Event, EventKind};
use crate::stream::LabeledSample;

/// Never adapts: the offline model scores the whole stream.
#[derive(Debug, Clone)]
pub struct StaticPipeline<C> {
    model: C,
}

impl<C: Classifier> StaticPipeline<C> {
    pub fn new(model: C) -> Self {
        StaticPipeline { model }
    }

    pub fn model(&self) -> &C {
        &self.model
    }
}

impl<C: Classifier> AdaptivePipeline for StaticPipeline<C> {
    fn predict(&mut self, features: &[f64]) -> Result<u8> {
        Ok(self.model.predict(features)?.class)
    }

    fn learn(&mut self, _: &LabeledSample) -> Result<Vec<Event>> {
        Ok(Vec::new())
    }

    fn memory_proxy(&self) -> usize {
        mem::size_of::<Self>() + self.model.memory_bytes()
    }

    fn method(&self) -> String {
        "offline".to_string()
    }
}

/// Always predicts the same class.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPipeline {
    class: u8,
}

impl ConstantPipeline {
    pub fn new(class: u8) -> Self {
        ConstantPipeline { class }
    }
}

impl AdaptivePipeline for ConstantPipeline {
    fn predict(&mut self, _: &[f64]) -> Result<u8> {
        Ok(self.class)
    }

    fn learn(&mut self, _: &LabeledSample) -> Result<Vec<Event>> {
        Ok(Vec::new())
    }

    fn memory_proxy(&self) -> usize {
        mem::size_of::<Self>()
    }

    fn method(&self) -> String {
        format!("constant-{}", self.class)
    }
}

/// Keeps every sample it has seen and, when `retrain_every` is set, refits
/// on the full history at that period.
pub struct FullHistoryPipeline<L: Learner> {
    learner: L,
    model: L::Model,
    history: Vec<LabeledSample>,
    history_bytes: usize,
    retrain_every: Option<usize>,
}

impl<L: Learner> FullHistoryPipeline<L> {
    pub fn new(learner: L, model: L::Model, retrain_every: Option<usize>) -> Self {
        FullHistoryPipeline {
            learner,
            model,
            history: Vec::new(),
            history_bytes: 0,
            retrain_every: retrain_every.filter(|&k| k > 0),
        }
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }
}

impl<L: Learner> AdaptivePipeline for FullHistoryPipeline<L> {
    fn predict(&mut self, features: &[f64]) -> Result<u8> {
        Ok(self.model.predict(features)?.class)
    }

    fn learn(&mut self, sample: &LabeledSample) -> Result<Vec<Event>> {
        self.history_bytes += sample_bytes(sample);
        self.history.push(sample.clone());
        match self.retrain_every {
            Some(k) if self.history.len().is_multiple_of(k) => {
                self.model = self.learner.fit(&self.history)?;
                Ok(vec![Event {
                    kind: EventKind::RetrainedOnDrift,
                    index: sample.index,
                    acc_now: None,
                    acc_ref: None,
                }])
            }
            _ => Ok(Vec::new()),
        }
    }

    fn memory_proxy(&self) -> usize {
        mem::size_of::<Self>() + self.model.memory_bytes() + self.history_bytes
    }

    fn method(&self) -> String {
        "full-history".to_string()
    }
}
