//! Streaming concept-drift detection and adaptation.
//!
//! The crate is organised around the two stages of an adaptive analytics
//! pipeline:
//!
//! * an offline stage that fits a gradient-boosted tree classifier on a
//!   historical prefix of the stream ([`classifier`]), optionally with its
//!   hyperparameters tuned by particle swarm optimisation ([`pso`]);
//! * an online stage that scores the remaining stream prequentially and
//!   adapts the model when the sliding-window accuracy collapses
//!   ([`oasw`]).
//!
//! [`detectors`] holds the classic DDM / EDDM / ADWIN detectors wired into the
//! same retrain loop for comparison, and [`eval`] provides the prequential
//! harness, metrics and report emission shared by every method.

pub mod classifier;
pub mod detectors;
pub mod error;
pub mod eval;
pub mod oasw;
pub mod pso;
pub mod stream;
mod util;

pub use error::{Error, Result};
