//! Labelled sample streams: ingestion, replay, reduction and synthetic drift
//! generators.
//!
//! A [`StreamSource`] is an immutable, shared sequence of samples plus a
//! private replay cursor. Cloning a source is cheap and yields an independent
//! cursor over the same data, which is how parallel tuning runs obtain their
//! own replays.

mod csv_loader;
mod synthetic;

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{ceil_fraction, rng};

pub use csv_loader::{load_csv, CsvLoader, CsvOptions};
pub use synthetic::{generate_synthetic, Concept, DriftKind, SyntheticDriftSpec};

/// One labelled observation. `label` is 0 (normal) or 1 (anomaly / attack).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub index: usize,
    pub features: Vec<f64>,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    /// Ordinal-encoded categorical column; the code of a value is its
    /// position in this list (first-seen order).
    Categorical(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub features: Vec<FeatureColumn>,
}

impl Schema {
    pub fn numeric(names: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Schema {
            features: names
                .into_iter()
                .map(|n| FeatureColumn {
                    name: n.into(),
                    kind: ColumnKind::Numeric,
                })
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.features.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }
}

/// A replayable stream of labelled samples delivered in index order.
#[derive(Debug, Clone)]
pub struct StreamSource {
    schema: Arc<Schema>,
    samples: Arc<[LabeledSample]>,
    cursor: usize,
}

impl StreamSource {
    /// Builds a stream from `(features, label)` rows, assigning indices
    /// `0..n` in order.
    pub fn from_rows(schema: Schema, rows: Vec<(Vec<f64>, u8)>) -> Result<Self> {
        let width = schema.width();
        let mut samples = Vec::with_capacity(rows.len());
        for (i, (features, label)) in rows.into_iter().enumerate() {
            if features.len() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    actual: features.len(),
                });
            }
            if label > 1 {
                return Err(Error::param(format!("label {label} at index {i} is not binary")));
            }
            samples.push(LabeledSample {
                index: i,
                features,
                label,
            });
        }
        Ok(StreamSource {
            schema: Arc::new(schema),
            samples: samples.into(),
            cursor: 0,
        })
    }

    fn reindexed(schema: Arc<Schema>, samples: impl IntoIterator<Item = LabeledSample>) -> Self {
        let samples: Vec<LabeledSample> = samples
            .into_iter()
            .enumerate()
            .map(|(i, mut s)| {
                s.index = i;
                s
            })
            .collect();
        StreamSource {
            schema,
            samples: samples.into(),
            cursor: 0,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn width(&self) -> usize {
        self.schema.width()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn position(&self) -> usize {
        self.cursor
    }

    /// Next sample in index order, advancing the cursor.
    pub fn next_sample(&mut self) -> Option<&LabeledSample> {
        let s = self.samples.get(self.cursor)?;
        self.cursor += 1;
        Some(s)
    }

    pub fn rewind(&mut self) {
        self.cursor = 0;
    }

    /// An independent replay of the same data starting at the beginning.
    pub fn replay(&self) -> StreamSource {
        StreamSource {
            schema: Arc::clone(&self.schema),
            samples: Arc::clone(&self.samples),
            cursor: 0,
        }
    }

    /// Samples `range`, re-indexed from zero.
    pub fn slice(&self, range: std::ops::Range<usize>) -> StreamSource {
        let end = range.end.min(self.len());
        let start = range.start.min(end);
        Self::reindexed(
            Arc::clone(&self.schema),
            self.samples[start..end].iter().cloned(),
        )
    }

    /// The trailing `ceil(fraction * len)` samples.
    pub fn tail(&self, fraction: f64) -> Result<StreamSource> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::param(format!("tail fraction {fraction} not in (0, 1]")));
        }
        let keep = ceil_fraction(fraction, self.len()).min(self.len());
        Ok(self.slice(self.len() - keep..self.len()))
    }

    /// `self` followed by `other`; both must share a schema.
    pub fn concat(&self, other: &StreamSource) -> Result<StreamSource> {
        if self.schema.names().ne(other.schema.names()) {
            return Err(Error::Schema(
                "cannot concatenate streams with different feature columns".into(),
            ));
        }
        // a shared loader only ever appends categories, so the later schema
        // describes both halves
        let schema = Arc::clone(&other.schema);
        Ok(Self::reindexed(
            schema,
            self.samples.iter().chain(other.samples.iter()).cloned(),
        ))
    }

    /// Writes the stream as CSV (`<feature names>,label`), preceded by
    /// `# `-prefixed comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        let mut header: Vec<&str> = self.schema.names().collect();
        header.push("label");
        writeln!(out, "{}", header.join(","))?;
        let mut line = String::new();
        for s in self.samples.iter() {
            line.clear();
            for v in &s.features {
                use std::fmt::Write as _;
                let _ = write!(line, "{v},");
            }
            line.push(if s.label == 1 { '1' } else { '0' });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Keeps one uniformly chosen sample from every consecutive block of
/// `keep_every` samples (the last partial block contributes one as well).
pub fn decimate(source: &StreamSource, keep_every: usize, seed: u64) -> Result<StreamSource> {
    if keep_every == 0 {
        return Err(Error::param("keep_every must be at least 1"));
    }
    if keep_every == 1 {
        return Ok(source.replay());
    }
    let mut rng = rng(seed);
    let kept = source.samples.chunks(keep_every).map(|block| {
        let pick = rng.gen_range(0..block.len());
        block[pick].clone()
    });
    Ok(StreamSource::reindexed(Arc::clone(&source.schema), kept.collect::<Vec<_>>()))
}

/// Leading offline portion and trailing online portion of a stream.
#[derive(Debug, Clone)]
pub struct HoldoutSplit {
    pub offline: StreamSource,
    pub online: StreamSource,
    pub fraction: f64,
}

/// Splits off the first `ceil(fraction * N)` samples for offline training.
/// The online part is re-indexed from zero.
pub fn holdout_split(source: &StreamSource, fraction: f64) -> Result<HoldoutSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::param(format!("holdout fraction {fraction} not in (0, 1)")));
    }
    let n = source.len();
    if n < 2 {
        return Err(Error::param(format!("cannot split a stream of length {n}")));
    }
    let cut = ceil_fraction(fraction, n);
    if cut == 0 || cut >= n {
        return Err(Error::param(format!(
            "fraction {fraction} leaves an empty side for a stream of length {n}"
        )));
    }
    Ok(HoldoutSplit {
        offline: source.slice(0..cut),
        online: source.slice(cut..n),
        fraction,
    })
}
