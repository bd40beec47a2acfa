//! Reference drift detectors (DDM, EDDM, ADWIN) and an adapter that refits
//! the classifier on recent samples whenever one of them signals drift.

mod adwin;
mod ddm;
mod eddm;

pub use adwin::{Adwin, AdwinConfig};
pub use ddm::{Ddm, DdmConfig};
pub use eddm::{Eddm, EddmConfig};

use std::collections::VecDeque;
use std::fmt;
use std::mem;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, GbdtLearner, GbdtModel, Learner};
use crate::error::{Error, Result};
use crate::eval::{prequential_evaluate, sample_bytes, AdaptivePipeline, EvaluationReport};
use crate::oasw::{Event, EventKind};
use crate::stream::{LabeledSample, StreamSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DriftLevel {
    InControl,
    Warning,
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftSignal {
    pub level: DriftLevel,
    /// Position of the input among all values fed to the detector.
    pub index: usize,
}

impl DriftSignal {
    fn in_control(index: usize) -> Self {
        DriftSignal {
            level: DriftLevel::InControl,
            index,
        }
    }
}

pub trait DriftDetector: Send {
    fn update(&mut self, value: f64) -> Result<DriftSignal>;

    /// Forgets all statistics; the input position keeps counting.
    fn reset(&mut self);

    /// Maps a prediction outcome to the value this detector monitors.
    fn encode(&self, correct: bool) -> f64;

    fn memory_bytes(&self) -> usize;

    fn name(&self) -> &'static str;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Ddm,
    Eddm,
    Adwin,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [DetectorKind::Ddm, DetectorKind::Eddm, DetectorKind::Adwin];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Ddm => "ddm",
            DetectorKind::Eddm => "eddm",
            DetectorKind::Adwin => "adwin",
        }
    }

    /// A detector with its default parameters.
    pub fn build(self) -> Detector {
        match self {
            DetectorKind::Ddm => Detector::Ddm(Ddm::default()),
            DetectorKind::Eddm => Detector::Eddm(Eddm::default()),
            DetectorKind::Adwin => Detector::Adwin(Adwin::default()),
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown detector {s:?}; valid names: ddm, eddm, adwin")))
    }
}

#[derive(Debug, Clone)]
pub enum Detector {
    Ddm(Ddm),
    Eddm(Eddm),
    Adwin(Adwin),
}

impl Detector {
    fn inner(&mut self) -> &mut dyn DriftDetector {
        match self {
            Detector::Ddm(d) => d,
            Detector::Eddm(d) => d,
            Detector::Adwin(d) => d,
        }
    }

    fn inner_ref(&self) -> &dyn DriftDetector {
        match self {
            Detector::Ddm(d) => d,
            Detector::Eddm(d) => d,
            Detector::Adwin(d) => d,
        }
    }
}

impl DriftDetector for Detector {
    fn update(&mut self, value: f64) -> Result<DriftSignal> {
        self.inner().update(value)
    }

    fn reset(&mut self) {
        self.inner().reset()
    }

    fn encode(&self, correct: bool) -> f64 {
        self.inner_ref().encode(correct)
    }

    fn memory_bytes(&self) -> usize {
        self.inner_ref().memory_bytes()
    }

    fn name(&self) -> &'static str {
        self.inner_ref().name()
    }
}

/// Prequential pipeline that feeds prediction outcomes to a detector and
/// refits on the last `retrain_window` samples when it signals drift.
pub struct DetectAndRetrain<L: Learner, D> {
    learner: L,
    model: L::Model,
    detector: D,
    recent: VecDeque<LabeledSample>,
    recent_bytes: usize,
    retrain_window: usize,
    warning: bool,
    retrain_pending: bool,
    pending_prediction: Option<u8>,
    model_bytes: usize,
    retrains: usize,
}

impl<L: Learner, D: DriftDetector> DetectAndRetrain<L, D> {
    pub fn new(learner: L, model: L::Model, detector: D, retrain_window: usize) -> Result<Self> {
        if retrain_window == 0 {
            return Err(Error::param("retrain_window must be positive"));
        }
        Ok(DetectAndRetrain {
            model_bytes: model.memory_bytes(),
            learner,
            model,
            detector,
            recent: VecDeque::with_capacity(retrain_window),
            recent_bytes: 0,
            retrain_window,
            warning: false,
            retrain_pending: false,
            pending_prediction: None,
            retrains: 0,
        })
    }

    pub fn retrain_count(&self) -> usize {
        self.retrains
    }

    pub fn detector(&self) -> &D {
        &self.detector
    }

    fn retrain(&mut self) -> Result<()> {
        self.recent.make_contiguous();
        self.model = self.learner.fit(self.recent.as_slices().0)?;
        self.model_bytes = self.model.memory_bytes();
        self.retrains += 1;
        Ok(())
    }
}

impl<L: Learner, D: DriftDetector> AdaptivePipeline for DetectAndRetrain<L, D> {
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
        if self.recent.len() == self.retrain_window {
            let old = self.recent.pop_front().expect("window is full");
            self.recent_bytes -= sample_bytes(&old);
        }
        self.recent_bytes += sample_bytes(sample);
        self.recent.push_back(sample.clone());

        let value = self.detector.encode(prediction == sample.label);
        let signal = self.detector.update(value)?;
        let event = |kind| Event {
            kind,
            index: sample.index,
            acc_now: None,
            acc_ref: None,
        };
        let mut events = Vec::new();
        match signal.level {
            DriftLevel::InControl => {
                if self.warning {
                    events.push(event(EventKind::FalseAlarm));
                }
                self.warning = false;
            }
            DriftLevel::Warning => {
                if !self.warning {
                    events.push(event(EventKind::WarningEntered));
                }
                self.warning = true;
            }
            DriftLevel::Drift => {
                self.warning = false;
                events.push(event(EventKind::DriftDetected));
                self.retrain_pending = true;
            }
        }
        if self.retrain_pending && self.recent.len() >= self.learner.min_retrain_samples() {
            self.retrain()?;
            self.retrain_pending = false;
            events.push(event(EventKind::RetrainedOnDrift));
        }
        Ok(events)
    }

    fn memory_proxy(&self) -> usize {
        mem::size_of::<Self>() + self.model_bytes + self.recent_bytes + self.detector.memory_bytes()
    }

    fn method(&self) -> String {
        self.detector.name().to_string()
    }
}

/// Replays `stream` with `detector` watching the offline model's outcomes.
pub fn detect_and_retrain(
    stream: &StreamSource,
    model: GbdtModel,
    detector: Detector,
    retrain_window: usize,
) -> Result<EvaluationReport> {
    let learner = GbdtLearner::new(model.params.clone());
    let mut pipeline = DetectAndRetrain::new(learner, model, detector, retrain_window)?;
    prequential_evaluate(&mut pipeline, &stream.replay())
}
