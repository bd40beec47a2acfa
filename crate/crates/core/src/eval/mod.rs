//! Prequential (test-then-train) evaluation, metrics, and report artifacts.

mod metrics;
mod pipelines;
mod report;

pub use metrics::{compute_metrics, ConfusionCounts, Metrics};
pub use pipelines::{ConstantPipeline, FullHistoryPipeline, StaticPipeline};
pub use report::{
    curve_csv, emit_report, events_jsonl, read_events, trace_csv, write_summary_table, EvaluationReport,
    ReportFormat, RunMeta, Summary, Timing, WindowPoint, CURVE_FILE, EVENTS_FILE, REPORT_FILE,
    REPORT_VERSION, SUMMARY_FILE, TRACE_FILE,
};

use std::mem;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::oasw::Event;
use crate::stream::{LabeledSample, StreamSource};

/// The step contract of an online learner. `predict` sees only features;
/// the labelled sample is revealed through `learn` afterwards.
pub trait AdaptivePipeline {
    fn predict(&mut self, features: &[f64]) -> Result<u8>;

    fn learn(&mut self, sample: &LabeledSample) -> Result<Vec<Event>>;

    /// Sliding-window accuracy after the last `learn`, when the pipeline
    /// tracks one.
    fn window_accuracy(&self) -> Option<f64> {
        None
    }

    /// Deterministic structural size in bytes of the live model and buffers.
    fn memory_proxy(&self) -> usize;

    fn method(&self) -> String {
        "pipeline".to_string()
    }
}

/// Structural size of one buffered sample.
pub fn sample_bytes(sample: &LabeledSample) -> usize {
    mem::size_of::<LabeledSample>() + sample.features.len() * mem::size_of::<f64>()
}

fn unix_ms() -> Option<u128> {
    SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_millis())
}

/// Replays `stream` through `pipeline`, scoring each sample before revealing
/// its label. A failing step ends the run early with `aborted` set.
pub fn prequential_evaluate<P: AdaptivePipeline + ?Sized>(
    pipeline: &mut P,
    stream: &StreamSource,
) -> Result<EvaluationReport> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let started = unix_ms();
    let n = stream.len();
    let mut labels = Vec::with_capacity(n);
    let mut predictions = Vec::with_capacity(n);
    let mut series = Vec::new();
    let mut events = Vec::new();
    let mut counts = ConfusionCounts::default();
    let (mut test_secs, mut update_secs) = (0.0, 0.0);
    let mut peak = pipeline.memory_proxy();
    let mut aborted = None;

    for sample in stream.samples() {
        let clock = Instant::now();
        let prediction = match pipeline.predict(&sample.features) {
            Ok(p) => p,
            Err(e) => {
                aborted = Some(format!("predict failed at index {}: {e}", sample.index));
                break;
            }
        };
        test_secs += clock.elapsed().as_secs_f64();
        labels.push(sample.label);
        predictions.push(prediction);
        counts.record(sample.label, prediction);

        let clock = Instant::now();
        match pipeline.learn(sample) {
            Ok(ev) => events.extend(ev),
            Err(e) => {
                aborted = Some(format!("update failed at index {}: {e}", sample.index));
                break;
            }
        }
        update_secs += clock.elapsed().as_secs_f64();
        if let Some(acc) = pipeline.window_accuracy() {
            series.push(WindowPoint {
                index: sample.index,
                window_accuracy: acc,
            });
        }
        peak = peak.max(pipeline.memory_proxy());
    }

    let scored = labels.len();
    let metrics = if scored == 0 {
        Metrics::default()
    } else {
        compute_metrics(&counts)?
    };
    let per = |secs: f64| {
        if scored == 0 {
            0.0
        } else {
            secs * 1e3 / scored as f64
        }
    };
    Ok(EvaluationReport {
        report_version: REPORT_VERSION,
        method: pipeline.method(),
        labels,
        predictions,
        window_acc_series: series,
        events,
        counts,
        metrics,
        timing: Timing {
            avg_test_time_ms: per(test_secs),
            avg_update_time_ms: per(update_secs),
            avg_amortized_time_ms: per(test_secs + update_secs),
        },
        memory_proxy_bytes: pipeline.memory_proxy(),
        peak_memory_proxy_bytes: peak,
        run_meta: RunMeta {
            started_unix_ms: started,
            finished_unix_ms: unix_ms(),
            ..RunMeta::default()
        },
        aborted,
    })
}
