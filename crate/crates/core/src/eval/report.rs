use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::metrics::{ConfusionCounts, Metrics};
use crate::error::{Error, Result};
use crate::oasw::{Event, EventKind};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPoint {
    pub index: usize,
    pub window_accuracy: f64,
}

/// Wall-clock costs in milliseconds per instance. Test time covers the
/// prediction call only; update time covers label reveal, detection and any
/// retraining; amortized time is their sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub avg_test_time_ms: f64,
    pub avg_update_time_ms: f64,
    pub avg_amortized_time_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    /// Free-form configuration snapshot supplied by the caller.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub started_unix_ms: Option<u128>,
    pub finished_unix_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub report_version: u32,
    pub method: String,
    /// Labels and predictions of every scored sample, in stream order.
    pub labels: Vec<u8>,
    pub predictions: Vec<u8>,
    pub window_acc_series: Vec<WindowPoint>,
    pub events: Vec<Event>,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
    pub timing: Timing,
    /// Structural memory proxy after the last sample, and its maximum.
    pub memory_proxy_bytes: usize,
    pub peak_memory_proxy_bytes: usize,
    pub run_meta: RunMeta,
    /// Set when a pipeline step failed; the report then covers the samples
    /// scored before the failure.
    pub aborted: Option<String>,
}

impl EvaluationReport {
    pub fn correct(&self) -> impl Iterator<Item = bool> + '_ {
        self.labels.iter().zip(&self.predictions).map(|(l, p)| l == p)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Accuracy over scored positions `range`, clipped to the trace.
    pub fn accuracy_between(&self, range: std::ops::Range<usize>) -> Option<f64> {
        let end = range.end.min(self.len());
        if range.start >= end {
            return None;
        }
        let hits = self.correct().skip(range.start).take(end - range.start).filter(|&c| c).count();
        Some(hits as f64 / (end - range.start) as f64)
    }

    pub fn count_events(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn retrains(&self) -> usize {
        self.count_events(EventKind::RetrainedOnDrift) + self.count_events(EventKind::StabilizationRetrain)
    }

    /// Zeroes every wall-clock field so that reports of identical runs
    /// compare equal.
    pub fn mask_timing(&mut self) {
        self.timing = Timing::default();
        self.run_meta.started_unix_ms = None;
        self.run_meta.finished_unix_ms = None;
    }

    pub fn summary(&self) -> Summary {
        Summary {
            report_version: self.report_version,
            method: self.method.clone(),
            samples: self.len(),
            accuracy: self.metrics.accuracy,
            precision: self.metrics.precision,
            recall: self.metrics.recall,
            f1: self.metrics.f1,
            precision_defined: self.metrics.precision_defined,
            recall_defined: self.metrics.recall_defined,
            f1_defined: self.metrics.f1_defined,
            avg_test_time_ms: self.timing.avg_test_time_ms,
            avg_update_time_ms: self.timing.avg_update_time_ms,
            avg_amortized_time_ms: self.timing.avg_amortized_time_ms,
            memory_proxy_bytes: self.memory_proxy_bytes,
            peak_memory_proxy_bytes: self.peak_memory_proxy_bytes,
            drift_points: self
                .events
                .iter()
                .filter(|e| e.kind == EventKind::DriftDetected)
                .map(|e| e.index)
                .collect(),
            retrains: self.retrains(),
            aborted: self.aborted.clone(),
        }
    }
}

/// One comparison-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub report_version: u32,
    pub method: String,
    pub samples: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_defined: bool,
    pub recall_defined: bool,
    pub f1_defined: bool,
    pub avg_test_time_ms: f64,
    pub avg_update_time_ms: f64,
    pub avg_amortized_time_ms: f64,
    pub memory_proxy_bytes: usize,
    pub peak_memory_proxy_bytes: usize,
    pub drift_points: Vec<usize>,
    pub retrains: usize,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    /// `summary.json` and the full `report.json`.
    Json,
    /// `curve.csv`, `events.jsonl` and `trace.csv`.
    CsvBundle,
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const REPORT_FILE: &str = "report.json";
pub const CURVE_FILE: &str = "curve.csv";
pub const EVENTS_FILE: &str = "events.jsonl";
pub const TRACE_FILE: &str = "trace.csv";

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn curve_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("index,window_accuracy\n");
    for p in &report.window_acc_series {
        out.push_str(&format!("{},{}\n", p.index, p.window_accuracy));
    }
    out
}

pub fn events_jsonl(report: &EvaluationReport) -> Result<String> {
    let mut out = String::new();
    for e in &report.events {
        out.push_str(&serde_json::to_string(e)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn trace_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("index,label,prediction,correct\n");
    for (i, (l, p)) in report.labels.iter().zip(&report.predictions).enumerate() {
        out.push_str(&format!("{i},{l},{p},{}\n", (l == p) as u8));
    }
    out
}

/// Writes the artifacts for each requested format into `dir` (created if
/// missing) and returns their paths. Output bytes depend only on the report.
pub fn emit_report(report: &EvaluationReport, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        written.push(path);
        Ok(())
    };
    for format in formats {
        match format {
            ReportFormat::Json => {
                let mut summary = serde_json::to_vec_pretty(&report.summary())?;
                summary.push(b'\n');
                put(SUMMARY_FILE, summary)?;
                let mut full = serde_json::to_vec(report)?;
                full.push(b'\n');
                put(REPORT_FILE, full)?;
            }
            ReportFormat::CsvBundle => {
                put(CURVE_FILE, curve_csv(report).into_bytes())?;
                put(EVENTS_FILE, events_jsonl(report)?.into_bytes())?;
                put(TRACE_FILE, trace_csv(report).into_bytes())?;
            }
        }
    }
    Ok(written)
}

/// Reads the events written by [`emit_report`].
pub fn read_events(path: &Path) -> Result<Vec<Event>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        out.push(serde_json::from_str(line)?);
    }
    Ok(out)
}

pub fn write_summary_table<W: Write>(mut out: W, rows: &[Summary]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<16} {:>9} {:>9} {:>9} {:>9} {:>12} {:>12}",
        "method", "acc%", "prec%", "rec%", "f1%", "test_ms", "mem_bytes"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<16} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>12.5} {:>12}",
            r.method,
            r.accuracy * 100.0,
            r.precision * 100.0,
            r.recall * 100.0,
            r.f1 * 100.0,
            r.avg_test_time_ms,
            r.memory_proxy_bytes
        )?;
    }
    Ok(())
}
