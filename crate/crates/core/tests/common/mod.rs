#![allow(dead_code)]

use oasw_core::classifier::{ClassifierParams, GbdtModel};
use oasw_core::oasw::{DriftState, Event, EventKind};
use oasw_core::stream::{generate_synthetic, StreamSource, SyntheticDriftSpec};

/// Small, fast boosted-tree settings for synthetic two-blob streams.
pub fn small_params(seed: u64) -> ClassifierParams {
    ClassifierParams {
        n_estimators: 30,
        max_depth: 4,
        learning_rate: 0.3,
        num_leaves: 8,
        min_data_in_leaf: 10,
        seed,
        ..Default::default()
    }
}

/// Model fitted on a fresh stationary stream of the generator's first concept.
pub fn offline_model(n: usize, noise: f64, seed: u64, params: &ClassifierParams) -> GbdtModel {
    let s = generate_synthetic(&SyntheticDriftSpec::stationary(noise, seed), n).unwrap();
    GbdtModel::fit(s.samples(), params).unwrap()
}

pub fn sudden_stream(change_points: Vec<usize>, noise: f64, seed: u64, len: usize) -> StreamSource {
    generate_synthetic(&SyntheticDriftSpec::sudden(change_points, noise, seed), len).unwrap()
}

/// Replays an event log through the legal transitions and returns the first
/// violation, if any.
pub fn check_transitions(events: &[Event], warm_up: usize) -> Result<DriftState, String> {
    let mut state = DriftState::Normal;
    let mut last_index = 0;
    let mut retrain_owed = false;
    for (k, e) in events.iter().enumerate() {
        if e.index < warm_up {
            return Err(format!("event {k} at {} inside warm-up {warm_up}", e.index));
        }
        if e.index < last_index {
            return Err(format!("event {k} index {} decreases", e.index));
        }
        last_index = e.index;
        let prev = k.checked_sub(1).map(|p| &events[p]);
        let same_step_prev = prev.filter(|p| p.index == e.index).map(|p| p.kind);
        state = match (state, e.kind) {
            (DriftState::Normal, EventKind::WarningEntered) => DriftState::Warning,
            (DriftState::Warning, EventKind::FalseAlarm) => DriftState::Normal,
            (DriftState::Warning, EventKind::DriftDetected) => {
                retrain_owed = true;
                DriftState::Drift
            }
            (DriftState::Drift, EventKind::RetrainedOnDrift) if retrain_owed => {
                retrain_owed = false;
                DriftState::Drift
            }
            (DriftState::Drift, EventKind::StabilizationRetrain) => {
                retrain_owed = false;
                DriftState::Normal
            }
            (DriftState::Normal, EventKind::WindowReleased)
                if matches!(
                    same_step_prev,
                    Some(EventKind::FalseAlarm) | Some(EventKind::StabilizationRetrain)
                ) =>
            {
                DriftState::Normal
            }
            (s, kind) => return Err(format!("illegal {kind:?} in state {s:?} at index {}", e.index)),
        };
    }
    Ok(state)
}
