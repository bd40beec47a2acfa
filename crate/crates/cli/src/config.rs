//! The run configuration file.
//!
//! ```toml
//! seed = 7
//!
//! [dataset]
//! path = "train.csv"
//! label_column = "label"
//! negative_labels = ["normal"]
//! drop_columns = ["id"]
//! decimate = 10
//! split_fraction = 0.1
//! # optional second file, appended after the tail of the first
//! second_path = "test.csv"
//! tail_fraction = 0.1
//!
//! [classifier.params]            # or [classifier.tune]
//! n_estimators = 200
//! max_depth = 8
//! learning_rate = 0.1
//! num_leaves = 63
//! min_data_in_leaf = 20
//!
//! [oasw.tune]                    # or [oasw.params]
//! swarm_size = 20
//! max_evaluations = 200
//! tune_fraction = 0.5
//!
//! [output]
//! dir = "out"
//! formats = ["json", "csv-bundle"]
//! ```
//!
//! Instead of `path`, a `[dataset.synthetic]` table with a `length` key and
//! the generator fields describes a synthetic stream.

use std::path::{Path, PathBuf};

use oasw_core::classifier::ClassifierParams;
use oasw_core::eval::ReportFormat;
use oasw_core::oasw::OaswParams;
use oasw_core::pso::{Dim, HyperParamSpace, PsoConfig};
use oasw_core::stream::SyntheticDriftSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub classifier: ClassifierSection,
    #[serde(default)]
    pub oasw: OaswSection,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A synthetic stream: `length` plus the generator fields, kept as a raw
/// table so unknown keys are reported by the generator's own parser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SyntheticSource(pub toml::Table);

impl SyntheticSource {
    pub fn resolve(&self) -> Result<(SyntheticDriftSpec, usize), CliError> {
        let mut table = self.0.clone();
        let length = match table.remove("length") {
            Some(toml::Value::Integer(n)) if n >= 0 => n as usize,
            Some(v) => return Err(CliError::Config(format!("length: expected a non-negative integer, got {v}"))),
            None => return Err(CliError::Config("length: missing".into())),
        };
        let spec = SyntheticDriftSpec::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Config(e.to_string()))?;
        spec.validate(length).map_err(|e| CliError::Config(e.to_string()))?;
        Ok((spec, length))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSource>,
    #[serde(default = "default_label_column")]
    pub label_column: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positive_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub negative_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop_columns: Vec<String>,
    /// Keep one sample out of every `decimate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimate: Option<usize>,
    /// Leading share of the stream used for offline training.
    #[serde(default = "default_split")]
    pub split_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_path: Option<PathBuf>,
    /// Share of the first file kept (from its end) when `second_path` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
}

fn default_label_column() -> String {
    "label".to_string()
}

fn default_split() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swarm_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cognitive: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub social: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_clamp_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Overrides of the default search ranges, keyed by dimension name.
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub ranges: std::collections::BTreeMap<String, Range>,
    /// Classifier only: forward-chaining validation folds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folds: Option<usize>,
    /// Engine only: leading share of the online stream scored while tuning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tune_fraction: Option<f64>,
}

impl TuneConfig {
    pub fn pso_config(&self, seed: u64) -> PsoConfig {
        let d = PsoConfig::default();
        let p = self;
        PsoConfig {
            swarm_size: p.swarm_size.unwrap_or(d.swarm_size),
            inertia: p.inertia.unwrap_or(d.inertia),
            cognitive: p.cognitive.unwrap_or(d.cognitive),
            social: p.social.unwrap_or(d.social),
            velocity_clamp_fraction: p.velocity_clamp_fraction.unwrap_or(d.velocity_clamp_fraction),
            max_evaluations: p.max_evaluations.unwrap_or(d.max_evaluations),
            seed,
            jobs: p.jobs.unwrap_or(d.jobs),
        }
    }

    /// `defaults` with any configured ranges substituted.
    pub fn space(&self, defaults: HyperParamSpace) -> Result<HyperParamSpace, CliError> {
        for name in self.ranges.keys() {
            if defaults.position_of(name).is_none() {
                let known: Vec<&str> = defaults.names().collect();
                return Err(CliError::Config(format!("unknown tuning range '{name}'; expected one of {known:?}")));
            }
        }
        let dims = defaults
            .dims
            .into_iter()
            .map(|d| match self.ranges.get(&d.name) {
                Some(r) => Dim {
                    low: r.low,
                    high: r.high,
                    ..d
                },
                None => d,
            })
            .collect();
        HyperParamSpace::new(dims).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ClassifierParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tune: Option<TuneConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OaswSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<OaswParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tune: Option<TuneConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("oasw-out")
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Json, ReportFormat::CsvBundle]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
            formats: default_formats(),
        }
    }
}

fn field<T>(name: &str, r: oasw_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(format!("{name}: {e}")))
}

impl RunConfig {
    /// Parses and checks the structure of a config document; file existence
    /// is checked by [`RunConfig::validate`].
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    /// Reads `path` and resolves relative dataset and output paths against its
/// directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = config.dataset.path.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.dataset.second_path.as_mut() {
            resolve(p);
        }
        resolve(&mut config.output.dir);
        Ok(config)
    }

    fn check(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let d = &self.dataset;
        match (&d.path, &d.synthetic) {
            (Some(_), Some(_)) => return bad("dataset: give either path or synthetic, not both".into()),
            (None, None) => return bad("dataset: one of path or synthetic is required".into()),
            (None, Some(s)) => {
                s.resolve().map_err(|e| CliError::Config(format!("dataset.synthetic: {e}")))?;
                if d.second_path.is_some() || d.tail_fraction.is_some() {
                    return bad("dataset: second_path and tail_fraction need a csv path".into());
                }
            }
            (Some(_), None) => {}
        }
        if !d.positive_labels.is_empty() && !d.negative_labels.is_empty() {
            return bad("dataset: give either positive_labels or negative_labels, not both".into());
        }
        if !(d.split_fraction > 0.0 && d.split_fraction < 1.0) {
            return bad(format!("dataset.split_fraction: {} not in (0, 1)", d.split_fraction));
        }
        if d.decimate == Some(0) {
            return bad("dataset.decimate: must be at least 1".into());
        }
        if let Some(f) = d.tail_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return bad(format!("dataset.tail_fraction: {f} not in (0, 1]"));
            }
            if d.second_path.is_none() {
                return bad("dataset.tail_fraction: only valid with second_path".into());
            }
        }
        match (&self.classifier.params, &self.classifier.tune) {
            (Some(_), Some(_)) => return bad("classifier: give either params or tune, not both".into()),
            (Some(p), None) => field("classifier.params", p.validate())?,
            (None, Some(t)) => {
                if t.tune_fraction.is_some() {
                    return bad("classifier.tune.tune_fraction: only valid for oasw.tune".into());
                }
                if t.folds == Some(0) {
                    return bad("classifier.tune.folds: must be at least 1".into());
                }
                t.space(HyperParamSpace::classifier_ranges())?;
                field("classifier.tune", t.pso_config(self.seed).validate())?;
            }
            (None, None) => {}
        }
        match (&self.oasw.params, &self.oasw.tune) {
            (Some(_), Some(_)) => return bad("oasw: give either params or tune, not both".into()),
            (Some(p), None) => field("oasw.params", p.validate())?,
            (None, Some(t)) => {
                if t.folds.is_some() {
                    return bad("oasw.tune.folds: only valid for classifier.tune".into());
                }
                if let Some(f) = t.tune_fraction {
                    if !(f > 0.0 && f <= 1.0) {
                        return bad(format!("oasw.tune.tune_fraction: {f} not in (0, 1]"));
                    }
                }
                t.space(HyperParamSpace::oasw_ranges())?;
                field("oasw.tune", t.pso_config(self.seed).validate())?;
            }
            (None, None) => {}
        }
        if self.output.formats.is_empty() {
            return bad("output.formats: at least one format is required".into());
        }
        Ok(())
    }

    /// Structural checks plus existence of every referenced file.
    pub fn validate(&self) -> Result<(), CliError> {
        self.check()?;
        for (name, p) in [("dataset.path", &self.dataset.path), ("dataset.second_path", &self.dataset.second_path)] {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(CliError::Config(format!("{name}: file {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }

    /// Classifier params with the run seed, when fixed.
    pub fn classifier_params(&self) -> ClassifierParams {
        let base = self.classifier.params.clone().unwrap_or_default();
        ClassifierParams { seed: self.seed, ..base }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises to toml")
    }
}

/// A standalone synthetic-stream description for `oasw synth`: `length` plus
/// the generator fields at top level.
pub fn parse_synth_spec(text: &str) -> Result<(SyntheticDriftSpec, usize), CliError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    SyntheticSource(table).resolve()
}
