//! Library side of the `oasw` command: config parsing and one function per
//! subcommand, so tests can drive the workflow without a subprocess.

pub mod config;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use oasw_core::classifier::{ClassifierParams, GbdtModel};
use oasw_core::detectors::{detect_and_retrain, DetectorKind};
use oasw_core::eval::{emit_report, prequential_evaluate, write_summary_table, EvaluationReport, StaticPipeline};
use oasw_core::oasw::{run_stream, OaswParams};
use oasw_core::pso::{tune_classifier, tune_oasw, write_trace, HyperParamSpace, PsoResult};
use oasw_core::stream::{decimate, generate_synthetic, holdout_split, CsvLoader, CsvOptions, HoldoutSplit, StreamSource};
use oasw_core::Error;

pub use config::{parse_synth_spec, RunConfig};

pub const MODEL_FILE: &str = "model.json";
pub const RESOLVED_CONFIG_FILE: &str = "resolved-config.toml";
pub const CLASSIFIER_TRACE_FILE: &str = "classifier-trace.csv";
pub const OASW_TRACE_FILE: &str = "oasw-trace.csv";

const DEFAULT_FOLDS: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Schema(_)
            | Error::Row { .. }
            | Error::EmptyStream
            | Error::WidthMismatch { .. }
            | Error::Csv(_)
            | Error::Io { .. }
            | Error::Model(_)
            | Error::Json(_) => CliError::Data(msg),
            Error::Spec(_) => CliError::Config(msg),
            _ => CliError::Runtime(msg),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(dir) = &self.out_dir {
            config.output.dir = dir.clone();
        }
        if let Some(jobs) = self.jobs {
            for tune in [config.classifier.tune.as_mut(), config.oasw.tune.as_mut()].into_iter().flatten() {
                tune.jobs = Some(jobs);
            }
        }
    }
}

/// Loads a config file, applies overrides and checks referenced files.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(path)?;
    overrides.apply(&mut config);
    config.validate()?;
    Ok(config)
}

/// The full stream described by the dataset section, before the split.
pub fn load_stream(config: &RunConfig) -> Result<StreamSource, CliError> {
    let d = &config.dataset;
    let stream = if let Some(synthetic) = &d.synthetic {
        let (spec, length) = synthetic.resolve()?;
        generate_synthetic(&spec, length)?
    } else {
        let path = d.path.as_ref().ok_or_else(|| CliError::Config("dataset.path missing".into()))?;
        let mut opts = CsvOptions::new(d.label_column.clone(), d.positive_labels.iter().cloned());
        opts.negative_labels = d.negative_labels.iter().cloned().collect::<BTreeSet<_>>();
        opts.drop_columns = d.drop_columns.clone();
        let mut loader = CsvLoader::new(opts);
        let first = loader.load_path(path)?;
        match &d.second_path {
            Some(second) => {
                let second = loader.load_path(second)?;
                first.tail(d.tail_fraction.unwrap_or(1.0))?.concat(&second)?
            }
            None => first,
        }
    };
    match d.decimate {
        Some(k) if k > 1 => Ok(decimate(&stream, k, config.seed)?),
        _ => Ok(stream),
    }
}

pub fn load_split(config: &RunConfig) -> Result<HoldoutSplit, CliError> {
    let split = holdout_split(&load_stream(config)?, config.dataset.split_fraction)?;
    if split.offline.is_empty() || split.online.is_empty() {
        return Err(CliError::Data(format!(
            "split_fraction {} leaves an empty offline or online part of {} samples",
            config.dataset.split_fraction,
            split.offline.len() + split.online.len()
        )));
    }
    log::info!("offline {} samples, online {} samples", split.offline.len(), split.online.len());
    Ok(split)
}

fn write_pso_trace(path: &Path, space: &HyperParamSpace, search: &PsoResult) -> Result<(), CliError> {
    let mut out = Vec::new();
    write_trace(&mut out, space, search)?;
    write_text(path, &String::from_utf8_lossy(&out))
}

/// Result of the offline stage.
#[derive(Debug, Clone)]
pub struct Trained {
    pub model: GbdtModel,
    pub config: RunConfig,
    pub model_path: PathBuf,
}

fn fit_offline(config: &RunConfig, offline: &StreamSource) -> Result<(ClassifierParams, GbdtModel), CliError> {
    let base = config.classifier_params();
    let params = match &config.classifier.tune {
        Some(tune) => {
            let space = tune.space(HyperParamSpace::classifier_ranges())?;
            let folds = tune.folds.unwrap_or(DEFAULT_FOLDS);
            let tuned = tune_classifier(offline.samples(), &space, &tune.pso_config(config.seed), folds, &base)?;
            log::info!("classifier tuned: fold accuracy {:.4}", tuned.accuracy);
            write_pso_trace(&config.output.dir.join(CLASSIFIER_TRACE_FILE), &space, &tuned.search)?;
            tuned.params
        }
        None => base,
    };
    let model = GbdtModel::fit(offline.samples(), &params)?;
    Ok((params, model))
}

fn finish_offline(mut config: RunConfig, params: ClassifierParams, model: GbdtModel) -> Result<Trained, CliError> {
    config.classifier.params = Some(params);
    config.classifier.tune = None;
    let model_path = config.output.dir.join(MODEL_FILE);
    write_text(&model_path, &model.to_json())?;
    write_text(&config.output.dir.join(RESOLVED_CONFIG_FILE), &config.to_toml())?;
    Ok(Trained { model, config, model_path })
}

/// `oasw train`: optional classifier tuning, then a fit on the offline split.
pub fn cmd_train(config: &RunConfig) -> Result<Trained, CliError> {
    let split = load_split(config)?;
    let (params, model) = fit_offline(config, &split.offline)?;
    finish_offline(config.clone(), params, model)
}

/// `oasw tune`: every configured search, recorded in the resolved config.
pub fn cmd_tune(config: &RunConfig) -> Result<Trained, CliError> {
    let split = load_split(config)?;
    let (params, model) = fit_offline(config, &split.offline)?;
    let mut resolved = config.clone();
    if config.oasw.tune.is_some() {
        resolved.oasw.params = Some(oasw_params(config, &model, &split.online)?);
        resolved.oasw.tune = None;
    }
    finish_offline(resolved, params, model)
}

fn oasw_params(config: &RunConfig, model: &GbdtModel, online: &StreamSource) -> Result<OaswParams, CliError> {
    if let Some(p) = config.oasw.params {
        return Ok(p);
    }
    let Some(tune) = &config.oasw.tune else {
        return Ok(OaswParams::default());
    };
    let space = tune.space(HyperParamSpace::oasw_ranges())?;
    let tuned = tune_oasw(online, model, &space, &tune.pso_config(config.seed), tune.tune_fraction)?;
    log::info!("oasw tuned: accuracy {:.4}", tuned.accuracy);
    write_pso_trace(&config.output.dir.join(OASW_TRACE_FILE), &space, &tuned.search)?;
    Ok(tuned.params)
}

pub fn load_model(path: &Path) -> Result<GbdtModel, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(GbdtModel::from_json(&text)?)
}

fn check_schema(model: &GbdtModel, stream: &StreamSource) -> Result<(), CliError> {
    if model.schema_width != stream.width() {
        return Err(Error::WidthMismatch {
            expected: model.schema_width,
            actual: stream.width(),
        }
        .into());
    }
    Ok(())
}

fn finish_report(config: &RunConfig, mut report: EvaluationReport, extra: serde_json::Value) -> Result<EvaluationReport, CliError> {
    report.run_meta.seeds = vec![config.seed];
    report.run_meta.config = serde_json::json!({
        "run": toml::Value::try_from(config).map_err(|e| CliError::Runtime(e.to_string()))?,
        "command": extra,
    });
    let dir = config.output.dir.join(&report.method);
    emit_report(&report, &dir, &config.output.formats)?;
    Ok(report)
}

/// `oasw run-oasw`: the adaptive engine on the online split, plus the
/// never-adapting model on the same samples for comparison.
pub fn cmd_run_oasw(config: &RunConfig, model_path: &Path) -> Result<Vec<EvaluationReport>, CliError> {
    let model = load_model(model_path)?;
    let split = load_split(config)?;
    check_schema(&model, &split.online)?;
    let params = oasw_params(config, &model, &split.online)?;
    let adapted = run_stream(model.clone(), &split.online, &params)?.report;
    let fixed = prequential_evaluate(&mut StaticPipeline::new(model), &split.online)?;
    let extra = serde_json::json!({ "oasw": params, "model": model_path });
    Ok(vec![
        finish_report(config, adapted, extra.clone())?,
        finish_report(config, fixed, extra)?,
    ])
}

/// `oasw baseline`: detect-and-retrain with one of the classic detectors.
/// The retrain window defaults to the engine's `t_prime_max`.
pub fn cmd_baseline(
    config: &RunConfig,
    model_path: &Path,
    detector: &str,
    retrain_window: Option<usize>,
) -> Result<EvaluationReport, CliError> {
    let kind: DetectorKind = detector.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
    let model = load_model(model_path)?;
    let split = load_split(config)?;
    check_schema(&model, &split.online)?;
    let window = retrain_window.unwrap_or_else(|| config.oasw.params.unwrap_or_default().t_prime_max);
    let report = detect_and_retrain(&split.online, model, kind.build(), window)?;
    let extra = serde_json::json!({ "detector": kind, "retrain_window": window, "model": model_path });
    finish_report(config, report, extra)
}

/// `oasw synth`: a generated stream as CSV, with the generator settings as
/// `#` comment lines.
pub fn cmd_synth(spec_text: &str, out: &Path) -> Result<usize, CliError> {
    let (spec, length) = parse_synth_spec(spec_text)?;
    let stream = generate_synthetic(&spec, length)?;
    let mut header = toml::to_string(&spec).map_err(|e| CliError::Runtime(e.to_string()))?;
    header.insert_str(0, &format!("length = {length}\n"));
    let mut bytes = Vec::new();
    stream.write_csv(&mut bytes, &[header]).map_err(|e| io_err(out, e))?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(out, bytes).map_err(|e| io_err(out, e))?;
    Ok(length)
}

pub fn print_summaries<W: Write>(out: W, reports: &[EvaluationReport]) -> Result<(), CliError> {
    let rows: Vec<_> = reports.iter().map(|r| r.summary()).collect();
    write_summary_table(out, &rows).map_err(|e| CliError::Runtime(e.to_string()))
}
