//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints a verdict line. Set `OASW_ACCEPTANCE_STRICT=1` to make the process
//! exit non-zero when any criterion fails.
//!
//! Pass criterion numbers as arguments to run a subset.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{check_transitions, offline_model, small_params, sudden_stream};
use oasw_core::classifier::{goss_subsample, ClassifierParams, GbdtLearner, GbdtModel};
use oasw_core::detectors::{Adwin, Ddm, DriftDetector, DriftLevel};
use oasw_core::eval::{
    compute_metrics, emit_report, prequential_evaluate, ConfusionCounts, EvaluationReport, ReportFormat,
    StaticPipeline, Summary, CURVE_FILE, EVENTS_FILE, REPORT_FILE, SUMMARY_FILE, TRACE_FILE,
};
use oasw_core::oasw::{run_stream, CorrectnessRing, EventKind, OaswEngine, OaswParams};
use oasw_core::pso::{pso_maximize, Dim, HyperParamSpace, PsoConfig};
use oasw_core::stream::{
    decimate, generate_synthetic, holdout_split, CsvLoader, CsvOptions, DriftKind, StreamSource, SyntheticDriftSpec,
};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 1. event-log transitions on random streams

const C1_STREAMS: u64 = 1000;
const C1_LEN: usize = 3000;
const C1_BUDGET: Duration = Duration::from_secs(120);

fn random_spec(rng: &mut ChaCha8Rng, seed: u64) -> SyntheticDriftSpec {
    let noise = rng.gen_range(0.0..0.2);
    let mut spec = SyntheticDriftSpec::stationary(noise, seed);
    match rng.gen_range(0..4) {
        0 => {}
        1 => {
            let a = rng.gen_range(200..1500);
            let b = rng.gen_range(a + 100..C1_LEN - 1);
            spec.change_points = vec![a, b];
        }
        2 => {
            spec.kind = DriftKind::Gradual;
            spec.change_points = vec![rng.gen_range(200..2000)];
            spec.transition_width = Some(rng.gen_range(10..800));
        }
        _ => {
            spec.kind = DriftKind::Recurring;
            spec.period = Some(rng.gen_range(150..1000));
        }
    }
    spec
}

fn random_params(rng: &mut ChaCha8Rng) -> OaswParams {
    let alpha = rng.gen_range(0.95..0.9999);
    let beta = rng.gen_range(0.90..alpha);
    let t = rng.gen_range(20..150);
    OaswParams {
        alpha,
        beta,
        t,
        t_prime_max: rng.gen_range(t..5 * t),
    }
}

fn criterion_1() -> Verdict {
    let started = Instant::now();
    let params = small_params(7);
    let model = offline_model(1500, 0.05, 99, &params);
    let failures: Vec<String> = (0..C1_STREAMS)
        .into_par_iter()
        .filter_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = random_spec(&mut rng, seed);
            let p = random_params(&mut rng);
            let stream = generate_synthetic(&spec, C1_LEN).unwrap();
            let mut engine = OaswEngine::new(p, GbdtLearner::new(params.clone()), model.clone()).unwrap();
            let mut log = Vec::new();
            for s in stream.samples() {
                let out = engine.step(s).unwrap();
                log.extend(out.events);
                let derived = match check_transitions(&log, 2 * p.t) {
                    Ok(st) => st,
                    Err(e) => return Some(format!("seed {seed}: {e}")),
                };
                if derived != engine.state() {
                    return Some(format!("seed {seed}: log says {derived:?}, engine {:?}", engine.state()));
                }
                if engine.adaptive_window().len() > p.t_prime_max {
                    return Some(format!("seed {seed}: adaptive window over capacity"));
                }
                if derived == oasw_core::oasw::DriftState::Normal && !engine.adaptive_window().is_empty() {
                    return Some(format!("seed {seed}: Normal with non-empty adaptive window"));
                }
            }
            None
        })
        .collect();
    let took = started.elapsed();
    let detail = format!(
        "{C1_STREAMS} streams, {} violations, {:.1}s (budget {}s){}",
        failures.len(),
        took.as_secs_f64(),
        C1_BUDGET.as_secs(),
        failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
    );
    verdict(failures.is_empty() && took < C1_BUDGET, detail)
}

// ---------------------------------------------------------------------------
// 2. recovery from a sudden label swap

const C2_SEEDS: u64 = 10;
const C2_REQUIRED: usize = 9;
const C2_CHANGE: usize = 5_000;
const C2_LEN: usize = 20_000;
const C2_DETECT_WINDOW: std::ops::RangeInclusive<usize> = 5_000..=6_000;
const C2_EVAL_FROM: usize = 8_000;
const C2_MIN_ADAPTED: f64 = 0.90;
const C2_MAX_STATIC: f64 = 0.60;

fn criterion_2() -> Verdict {
    let oasw = OaswParams {
        alpha: 0.98,
        beta: 0.95,
        t: 300,
        t_prime_max: 1000,
    };
    let rows: Vec<(bool, String)> = (0..C2_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let params = small_params(seed);
            let stream = sudden_stream(vec![C2_CHANGE], 0.05, seed, C2_LEN);
            let model = offline_model(2000, 0.05, seed + 10_000, &params);
            let adapted = run_stream(model.clone(), &stream, &oasw).unwrap().report;
            let fixed = prequential_evaluate(&mut StaticPipeline::new(model), &stream).unwrap();
            let drifts: Vec<usize> = adapted
                .events
                .iter()
                .filter(|e| e.kind == EventKind::DriftDetected)
                .map(|e| e.index)
                .collect();
            let detected = drifts.iter().any(|i| C2_DETECT_WINDOW.contains(i));
            let acc = adapted.accuracy_between(C2_EVAL_FROM..C2_LEN).unwrap();
            let base = fixed.accuracy_between(C2_EVAL_FROM..C2_LEN).unwrap();
            let ok = detected && acc >= C2_MIN_ADAPTED && base <= C2_MAX_STATIC;
            (ok, format!("seed {seed}: drifts {drifts:?} adapted {acc:.4} static {base:.4}"))
        })
        .collect();
    let passed = rows.iter().filter(|r| r.0).count();
    let worst = rows.iter().find(|r| !r.0).map(|r| format!("; failing {}", r.1)).unwrap_or_default();
    verdict(
        passed >= C2_REQUIRED,
        format!("{passed}/{C2_SEEDS} seeds meet detection, recovery and static-floor checks{worst}"),
    )
}

// ---------------------------------------------------------------------------
// 3. ring-buffer window accuracy against a flat list

const C3_CASES: u64 = 10_000;

fn criterion_3() -> Verdict {
    let mut mismatches = 0u64;
    let mut queries = 0u64;
    for case in 0..C3_CASES {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let t = rng.gen_range(1..40);
        let capacity = 2 * t + rng.gen_range(0..5);
        let len = rng.gen_range(1..300);
        let p = rng.gen_range(0.0..1.0);
        let flags: Vec<bool> = (0..len).map(|_| rng.gen_bool(p)).collect();
        let mut ring = CorrectnessRing::new(capacity);
        for (i, &f) in flags.iter().enumerate() {
            ring.push(f);
            for end in [i, i.saturating_sub(t)] {
                if end + 1 < t {
                    continue;
                }
                let hits = flags[end + 1 - t..=end].iter().filter(|&&x| x).count();
                let naive = hits as f64 / t as f64;
                queries += 1;
                if ring.window_accuracy(end, t) != Some(naive) {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("{C3_CASES} random streams, {queries} window queries, {mismatches} mismatches"),
    )
}

// ---------------------------------------------------------------------------
// 4. swarm search on the sphere function

const C4_RUNS: u64 = 100;
const C4_REQUIRED: usize = 95;
const C4_TOLERANCE: f64 = 1e-2;

fn criterion_4() -> Verdict {
    let space = HyperParamSpace::new((0..4).map(|k| Dim::real(&format!("x{k}"), -5.0, 5.0)).collect()).unwrap();
    let results: Vec<(bool, bool)> = (0..C4_RUNS)
        .into_par_iter()
        .map(|seed| {
            let cfg = PsoConfig {
                swarm_size: 20,
                max_evaluations: 20 * 50,
                seed,
                ..Default::default()
            };
            let r = pso_maximize(&space, |x| Ok(-x.iter().map(|v| v * v).sum::<f64>()), &cfg).unwrap();
            let dist = r.best_position.iter().map(|v| v * v).sum::<f64>().sqrt();
            let monotone = r.history.windows(2).all(|w| w[1] >= w[0]);
            (dist <= C4_TOLERANCE, monotone)
        })
        .collect();
    let hits = results.iter().filter(|r| r.0).count();
    let monotone = results.iter().all(|r| r.1);
    verdict(
        hits >= C4_REQUIRED && monotone,
        format!("{hits}/{C4_RUNS} runs within {C4_TOLERANCE} of the optimum; history nondecreasing in all runs: {monotone}"),
    )
}

// ---------------------------------------------------------------------------
// 5. boosted trees: XOR, loss trace, structural caps

const C5_SWEEP: u64 = 60;

fn xor_samples() -> Vec<oasw_core::stream::LabeledSample> {
    let mut out = Vec::new();
    for rep in 0..25 {
        for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            out.push(oasw_core::stream::LabeledSample {
                index: out.len(),
                features: vec![a + rep as f64 * 1e-3, b - rep as f64 * 1e-3],
                label: ((a != b) as u8),
            });
        }
    }
    out
}

fn criterion_5() -> Verdict {
    let xor = xor_samples();
    let params = ClassifierParams {
        n_estimators: 20,
        max_depth: 3,
        learning_rate: 0.5,
        num_leaves: 4,
        min_data_in_leaf: 5,
        ..Default::default()
    };
    let model = GbdtModel::fit(&xor, &params).unwrap();
    let xor_acc = xor
        .iter()
        .filter(|s| model.predict(&s.features).unwrap().class == s.label)
        .count() as f64
        / xor.len() as f64;

    let noisy = sudden_stream(vec![], 0.1, 5, 1500);
    let mut loss_ok = true;
    let mut caps_ok = true;
    let mut trees = 0usize;
    for seed in 0..C5_SWEEP {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ClassifierParams {
            n_estimators: rng.gen_range(1..25),
            max_depth: rng.gen_range(1..8),
            learning_rate: rng.gen_range(0.01..0.99),
            num_leaves: rng.gen_range(2..40),
            min_data_in_leaf: rng.gen_range(1..60),
            seed,
            ..Default::default()
        };
        let n = rng.gen_range(50..noisy.len());
        let (m, trace) = GbdtModel::fit_with_loss_trace(&noisy.samples()[..n], &p).unwrap();
        loss_ok &= trace.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        for tree in &m.trees {
            trees += 1;
            let leaves = tree.leaves();
            caps_ok &= leaves.len() <= p.num_leaves;
            caps_ok &= leaves.iter().all(|&(d, c)| d <= p.max_depth && (tree.nodes.len() == 1 || c >= p.min_data_in_leaf));
        }
    }
    verdict(
        xor_acc == 1.0 && loss_ok && caps_ok,
        format!("xor accuracy {xor_acc}; loss nonincreasing: {loss_ok}; caps hold on {trees} trees: {caps_ok}"),
    )
}

// ---------------------------------------------------------------------------
// 6. GOSS reweighting is unbiased

const C6_SEEDS: u64 = 1000;
const C6_TOLERANCE: f64 = 0.05;

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grads: Vec<f64> = (0..10_000)
        .map(|_| {
            let p: f64 = rng.gen_range(0.0..1.0);
            let y = rng.gen_bool(0.3) as u8 as f64;
            p - y
        })
        .collect();
    let full: f64 = grads.iter().sum();
    let estimates: Vec<f64> = (0..C6_SEEDS)
        .map(|seed| {
            let s = goss_subsample(&grads, 0.2, 0.1, seed).unwrap();
            s.indices.iter().zip(&s.weights).map(|(&i, w)| w * grads[i]).sum()
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let rel = ((mean - full) / full).abs();
    let per_seed = estimates.iter().map(|e| ((e - full) / full).abs()).sum::<f64>() / estimates.len() as f64;
    verdict(
        rel <= C6_TOLERANCE,
        format!("full sum {full:.3}, mean GOSS estimate {mean:.3}, relative error {rel:.5} (mean per-seed {per_seed:.5})"),
    )
}

// ---------------------------------------------------------------------------
// 7. live sample bound over a long run

const C7_LEN: usize = 100_000;

fn criterion_7() -> Verdict {
    let params = small_params(3);
    let p = OaswParams {
        alpha: 0.98,
        beta: 0.95,
        t: 300,
        t_prime_max: 1000,
    };
    let mut spec = SyntheticDriftSpec::stationary(0.05, 77);
    spec.kind = DriftKind::Recurring;
    spec.period = Some(7_000);
    let stream = generate_synthetic(&spec, C7_LEN).unwrap();
    let model = offline_model(2000, 0.05, 78, &params);
    let mut engine = OaswEngine::new(p, GbdtLearner::new(params), model).unwrap();
    let bound = p.t_prime_max + 2 * p.t;
    let mut peak = 0;
    let mut over = 0usize;
    for s in stream.samples() {
        engine.step(s).unwrap();
        let live = engine.live_samples();
        peak = peak.max(live);
        over += (live > bound) as usize;
    }
    verdict(
        over == 0,
        format!(
            "{C7_LEN} steps, {} retrains, peak live samples {peak}, bound {bound}, violations {over}",
            engine.retrain_count()
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. reference detectors

const C8_RUNS: u64 = 100;
const C8_REQUIRED: usize = 95;
const C8_STEP: usize = 500;
const C8_DELAY: usize = 100;
const C8_STATIONARY_LEN: usize = 10_000;

fn bernoulli_errors(seed: u64, len: usize, change: Option<usize>) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|i| {
            let p = if change.is_some_and(|c| i >= c) { 0.5 } else { 0.05 };
            rng.gen_bool(p) as u8 as f64
        })
        .collect()
}

fn drift_positions<D: DriftDetector>(mut d: D, values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| d.update(v).unwrap().level == DriftLevel::Drift)
        .map(|(i, _)| i)
        .collect()
}

fn criterion_8() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["ddm", "adwin"] {
        let run = |values: &[f64]| match name {
            "ddm" => drift_positions(Ddm::default(), values),
            _ => drift_positions(Adwin::default(), values),
        };
        let detected = (0..C8_RUNS)
            .filter(|&seed| {
                let v = bernoulli_errors(seed, C8_STEP + 500, Some(C8_STEP));
                run(&v).iter().any(|&i| (C8_STEP..C8_STEP + C8_DELAY).contains(&i))
            })
            .count();
        let noisy_streams = (0..C8_RUNS)
            .filter(|&seed| !run(&bernoulli_errors(1_000_000 + seed, C8_STATIONARY_LEN, None)).is_empty())
            .count();
        ok &= detected >= C8_REQUIRED && noisy_streams == 0;
        lines.push(format!(
            "{name}: step flagged within {C8_DELAY} in {detected}/{C8_RUNS}, stationary streams with a drift signal {noisy_streams}/{C8_RUNS}"
        ));
    }
    verdict(ok, lines.join("; "))
}

// ---------------------------------------------------------------------------
// 9. published dataset figures (needs the data files)

const C9_IOT_MIN: f64 = 0.995;
const C9_NSL_MIN: f64 = 0.965;
const C9_NSL_STATIC_MAX: f64 = 0.90;
const C9_SPLIT: f64 = 0.1;

fn env_path(name: &str) -> Option<PathBuf> {
    std::env::var_os(name).map(PathBuf::from).filter(|p| p.exists())
}

fn env_list(name: &str, default: &[&str]) -> Vec<String> {
    std::env::var(name)
        .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
        .unwrap_or_else(|_| default.iter().map(|s| s.to_string()).collect())
}

fn run_dataset(stream: &StreamSource, clf: &ClassifierParams, oasw: &OaswParams) -> (EvaluationReport, EvaluationReport) {
    let split = holdout_split(stream, C9_SPLIT).unwrap();
    let model = GbdtModel::fit(split.offline.samples(), clf).unwrap();
    let adapted = run_stream(model.clone(), &split.online, oasw).unwrap().report;
    let fixed = prequential_evaluate(&mut StaticPipeline::new(model), &split.online).unwrap();
    (adapted, fixed)
}

fn criterion_9() -> Verdict {
    let iot = env_path("OASW_IOTID20_CSV");
    let train = env_path("OASW_NSLKDD_TRAIN_CSV");
    let test = env_path("OASW_NSLKDD_TEST_CSV");
    if iot.is_none() && (train.is_none() || test.is_none()) {
        return Verdict::Skip(
            "set OASW_IOTID20_CSV and/or OASW_NSLKDD_TRAIN_CSV + OASW_NSLKDD_TEST_CSV to run".into(),
        );
    }
    let mut lines = Vec::new();
    let mut ok = true;
    if let Some(path) = iot {
        let mut opts = CsvOptions::new(
            std::env::var("OASW_IOTID20_LABEL").unwrap_or_else(|_| "Label".into()),
            env_list("OASW_IOTID20_POSITIVE", &["Anomaly"]),
        );
        opts.drop_columns = env_list("OASW_IOTID20_DROP", &["Flow_ID", "Src_IP", "Dst_IP", "Timestamp", "Cat", "Sub_Cat"]);
        let full = CsvLoader::new(opts).load_path(&path).unwrap();
        let reduced = decimate(&full, 10, 0).unwrap();
        let (adapted, _) = run_dataset(&reduced, &ClassifierParams::iotid20(), &OaswParams::iotid20());
        let acc = adapted.metrics.accuracy;
        ok &= acc >= C9_IOT_MIN;
        lines.push(format!("iotid20: {} records, accuracy {:.4} (min {C9_IOT_MIN})", reduced.len(), acc));
    } else {
        lines.push("iotid20: skipped".into());
    }
    if let (Some(train), Some(test)) = (train, test) {
        let mut opts = CsvOptions::new(
            std::env::var("OASW_NSLKDD_LABEL").unwrap_or_else(|_| "label".into()),
            Vec::<String>::new(),
        );
        opts.negative_labels = env_list("OASW_NSLKDD_NORMAL", &["normal"]).into_iter().collect::<BTreeSet<_>>();
        opts.drop_columns = env_list("OASW_NSLKDD_DROP", &[]);
        let mut loader = CsvLoader::new(opts);
        let train = loader.load_path(&train).unwrap();
        let test = loader.load_path(&test).unwrap();
        let stream = train.tail(0.1).unwrap().concat(&test).unwrap();
        let (adapted, fixed) = run_dataset(&stream, &ClassifierParams::nsl_kdd(), &OaswParams::nsl_kdd());
        let acc = adapted.metrics.accuracy;
        let base = fixed.metrics.accuracy;
        ok &= acc >= C9_NSL_MIN && base < C9_NSL_STATIC_MAX;
        let drifts: Vec<usize> = adapted
            .events
            .iter()
            .filter(|e| e.kind == EventKind::DriftDetected)
            .map(|e| e.index)
            .collect();
        lines.push(format!(
            "nsl-kdd: {} records, accuracy {acc:.4} (min {C9_NSL_MIN}), no-adaptation {base:.4} (max {C9_NSL_STATIC_MAX}), drift points {drifts:?}",
            stream.len()
        ));
    } else {
        lines.push("nsl-kdd: skipped".into());
    }
    verdict(ok, lines.join("; "))
}

// ---------------------------------------------------------------------------
// 10. report self-consistency and byte-stable artifacts

const C10_TOLERANCE: f64 = 1e-12;

fn seeded_report() -> EvaluationReport {
    let params = small_params(11);
    let stream = sudden_stream(vec![1500], 0.05, 11, 4000);
    let model = offline_model(1000, 0.05, 12, &params);
    let p = OaswParams {
        alpha: 0.98,
        beta: 0.95,
        t: 100,
        t_prime_max: 400,
    };
    let mut report = run_stream(model, &stream, &p).unwrap().report;
    report.mask_timing();
    report
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    [SUMMARY_FILE, REPORT_FILE, CURVE_FILE, EVENTS_FILE, TRACE_FILE]
        .iter()
        .map(|f| (f.to_string(), std::fs::read(dir.join(f)).unwrap()))
        .collect()
}

fn criterion_10() -> Verdict {
    let formats = [ReportFormat::Json, ReportFormat::CsvBundle];
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = seeded_report();
    emit_report(&first, &a, &formats).unwrap();
    emit_report(&seeded_report(), &b, &formats).unwrap();
    let stable = read_dir_bytes(&a) == read_dir_bytes(&b);

    let summary: Summary = serde_json::from_slice(&std::fs::read(a.join(SUMMARY_FILE)).unwrap()).unwrap();
    let mut rdr = csv::Reader::from_path(a.join(TRACE_FILE)).unwrap();
    let mut counts = ConfusionCounts::default();
    for row in rdr.records() {
        let row = row.unwrap();
        counts.record(row[1].parse().unwrap(), row[2].parse().unwrap());
    }
    let m = compute_metrics(&counts).unwrap();
    let gaps = [
        (m.accuracy - summary.accuracy).abs(),
        (m.precision - summary.precision).abs(),
        (m.recall - summary.recall).abs(),
        (m.f1 - summary.f1).abs(),
    ];
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    let curve_rows = std::fs::read_to_string(a.join(CURVE_FILE)).unwrap().lines().count() - 1;
    let curve_ok = curve_rows == first.len() - 2 * 100;
    verdict(
        stable && worst <= C10_TOLERANCE && curve_ok,
        format!(
            "artifacts byte-identical across runs: {stable}; max metric gap {worst:e} (tol {C10_TOLERANCE:e}); curve rows {curve_rows}"
        ),
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "state-machine transitions", criterion_1),
        (2, "sudden-drift recovery", criterion_2),
        (3, "window-accuracy oracle", criterion_3),
        (4, "swarm search sanity", criterion_4),
        (5, "boosted-tree suite", criterion_5),
        (6, "GOSS unbiasedness", criterion_6),
        (7, "live-memory bound", criterion_7),
        (8, "reference detectors", criterion_8),
        (9, "dataset reproduction", criterion_9),
        (10, "report consistency and snapshots", criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let v = run();
        let secs = started.elapsed().as_secs_f64();
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed.push(id);
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id:>2} [{name}] {tag} ({secs:.1}s): {detail}");
    }
    if failed.is_empty() {
        println!("acceptance: all executed criteria passed");
        return;
    }
    println!("acceptance: failed criteria {failed:?}");
    // the verdict lines are the report; a nonzero exit is opt-in for gating
    if std::env::var_os("OASW_ACCEPTANCE_STRICT").is_some_and(|v| v != "0") {
        std::process::exit(1);
    }
}
