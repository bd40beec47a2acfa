use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Schema, StreamSource};
use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftKind {
    Sudden,
    Gradual,
    Recurring,
}

/// Which class-to-blob assignment generates a sample. Concept `A` draws
/// class `y` from blob `y`; concept `B` draws it from blob `1 - y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Concept {
    A,
    B,
}

impl Concept {
    fn flipped(self) -> Concept {
        match self {
            Concept::A => Concept::B,
            Concept::B => Concept::A,
        }
    }
}

/// Two unit-variance Gaussian blobs centred at `-separation` and
/// `+separation` on every axis; drift swaps which class each blob belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticDriftSpec {
    pub kind: DriftKind,
    #[serde(default)]
    pub change_points: Vec<usize>,
    /// Gradual drift only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition_width: Option<usize>,
    /// Recurring drift only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default)]
    pub noise_rate: f64,
    #[serde(default = "default_dims")]
    pub dims: usize,
    #[serde(default = "default_separation")]
    pub separation: f64,
    #[serde(default = "default_positive_fraction")]
    pub positive_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_dims() -> usize {
    2
}
fn default_separation() -> f64 {
    2.0
}
fn default_positive_fraction() -> f64 {
    0.5
}

impl SyntheticDriftSpec {
    /// Sudden drift with the given change points and defaults elsewhere.
    pub fn sudden(change_points: Vec<usize>, noise_rate: f64, seed: u64) -> Self {
        SyntheticDriftSpec {
            kind: DriftKind::Sudden,
            change_points,
            transition_width: None,
            period: None,
            noise_rate,
            dims: default_dims(),
            separation: default_separation(),
            positive_fraction: default_positive_fraction(),
            seed,
        }
    }

    /// A single concept, no drift.
    pub fn stationary(noise_rate: f64, seed: u64) -> Self {
        Self::sudden(Vec::new(), noise_rate, seed)
    }

    pub fn validate(&self, length: usize) -> Result<()> {
        let fail = |m: String| Err(Error::Spec(m));
        if length == 0 {
            return fail("length must be positive".into());
        }
        if !(self.noise_rate >= 0.0 && self.noise_rate < 0.5) {
            return fail(format!("noise_rate {} not in [0, 0.5)", self.noise_rate));
        }
        if self.dims == 0 {
            return fail("dims must be at least 1".into());
        }
        if !(self.separation.is_finite() && self.separation > 0.0) {
            return fail(format!("separation {} must be positive", self.separation));
        }
        if !(self.positive_fraction > 0.0 && self.positive_fraction < 1.0) {
            return fail(format!(
                "positive_fraction {} not in (0, 1)",
                self.positive_fraction
            ));
        }
        if self.change_points.windows(2).any(|w| w[0] >= w[1]) {
            return fail("change_points must be strictly increasing".into());
        }
        if let Some(&last) = self.change_points.last() {
            if length <= last {
                return fail(format!("length {length} must exceed last change point {last}"));
            }
        }
        match self.kind {
            DriftKind::Sudden => {
                if self.transition_width.is_some() {
                    return fail("transition_width is only valid for gradual drift".into());
                }
                if self.period.is_some() {
                    return fail("period is only valid for recurring drift".into());
                }
            }
            DriftKind::Gradual => {
                if self.period.is_some() {
                    return fail("period is only valid for recurring drift".into());
                }
                let w = match self.transition_width {
                    Some(w) if w >= 1 => w,
                    _ => return fail("gradual drift needs transition_width >= 1".into()),
                };
                if self.change_points.windows(2).any(|p| p[0] + w > p[1]) {
                    return fail("gradual transitions overlap".into());
                }
            }
            DriftKind::Recurring => {
                if self.transition_width.is_some() {
                    return fail("transition_width is only valid for gradual drift".into());
                }
                match self.period {
                    Some(p) if p >= 1 => {}
                    _ => return fail("recurring drift needs period >= 1".into()),
                }
                if self.change_points.len() > 1 {
                    return fail("recurring drift takes at most one change point (its start)".into());
                }
            }
        }
        Ok(())
    }

    /// Concept in force at `i` for the deterministic kinds; gradual drift
    /// returns the concept being left behind inside a transition.
    pub fn base_concept(&self, i: usize) -> Concept {
        match self.kind {
            DriftKind::Sudden | DriftKind::Gradual => {
                let passed = self.change_points.iter().filter(|&&cp| cp <= i).count();
                let completed = match (self.kind, self.transition_width) {
                    (DriftKind::Gradual, Some(w)) => {
                        let inside = self
                            .change_points
                            .iter()
                            .any(|&cp| cp <= i && i < cp + w);
                        passed - inside as usize
                    }
                    _ => passed,
                };
                if completed % 2 == 0 {
                    Concept::A
                } else {
                    Concept::B
                }
            }
            DriftKind::Recurring => {
                let period = self.period.unwrap_or(1);
                let start = self.change_points.first().copied().unwrap_or(period);
                if i < start || ((i - start) / period) % 2 == 1 {
                    Concept::A
                } else {
                    Concept::B
                }
            }
        }
    }

    /// Probability that sample `i` comes from the incoming concept during a
    /// gradual transition (0 outside transitions).
    fn transition_probability(&self, i: usize) -> f64 {
        match (self.kind, self.transition_width) {
            (DriftKind::Gradual, Some(w)) => self
                .change_points
                .iter()
                .find(|&&cp| cp <= i && i < cp + w)
                .map_or(0.0, |&cp| (i - cp) as f64 / w as f64),
            _ => 0.0,
        }
    }
}

/// Generates `length` samples according to `spec`. Identical specs produce
/// identical streams.
pub fn generate_synthetic(spec: &SyntheticDriftSpec, length: usize) -> Result<StreamSource> {
    spec.validate(length)?;
    let mut rng = rng(spec.seed);
    let mut rows = Vec::with_capacity(length);
    for i in 0..length {
        let mut concept = spec.base_concept(i);
        let p_new = spec.transition_probability(i);
        if p_new > 0.0 && rng.gen::<f64>() < p_new {
            concept = concept.flipped();
        }
        let label = (rng.gen::<f64>() < spec.positive_fraction) as u8;
        let blob = match concept {
            Concept::A => label,
            Concept::B => 1 - label,
        };
        let centre = if blob == 1 {
            spec.separation
        } else {
            -spec.separation
        };
        let features: Vec<f64> = (0..spec.dims)
            .map(|_| centre + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let noisy = rng.gen::<f64>() < spec.noise_rate;
        rows.push((features, if noisy { 1 - label } else { label }));
    }
    let schema = Schema::numeric((0..spec.dims).map(|d| format!("x{d}")));
    StreamSource::from_rows(schema, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The Bayes rule for concept A: class 1 iff the point is nearer the
    /// positive blob.
    fn concept_a_rule(x: &[f64]) -> u8 {
        (x.iter().sum::<f64>() > 0.0) as u8
    }

    #[test]
    fn sudden_swaps_labelling_at_change_point() {
        let spec = SyntheticDriftSpec::sudden(vec![500], 0.0, 11);
        let s = generate_synthetic(&spec, 1000).unwrap();
        let agree = |r: std::ops::Range<usize>| {
            let n = r.len() as f64;
            r.filter(|&i| concept_a_rule(&s.samples()[i].features) == s.samples()[i].label)
                .count() as f64
                / n
        };
        assert!(agree(0..500) > 0.97);
        assert!(agree(500..1000) < 0.03);
        assert_eq!(spec.base_concept(499), Concept::A);
        assert_eq!(spec.base_concept(500), Concept::B);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let spec = SyntheticDriftSpec {
            kind: DriftKind::Gradual,
            change_points: vec![100, 400],
            transition_width: Some(50),
            period: None,
            noise_rate: 0.1,
            dims: 3,
            separation: 1.0,
            positive_fraction: 0.3,
            seed: 5,
        };
        let a = generate_synthetic(&spec, 600).unwrap();
        let b = generate_synthetic(&spec, 600).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_eq!(a.width(), 3);
    }

    #[test]
    fn gradual_ramp_fraction() {
        let spec = SyntheticDriftSpec {
            kind: DriftKind::Gradual,
            change_points: vec![1000],
            transition_width: Some(2000),
            period: None,
            noise_rate: 0.0,
            dims: 2,
            separation: 4.0,
            positive_fraction: 0.5,
            seed: 1,
        };
        let s = generate_synthetic(&spec, 4000).unwrap();
        let frac_b = |r: std::ops::Range<usize>| {
            let n = r.len() as f64;
            r.filter(|&i| concept_a_rule(&s.samples()[i].features) != s.samples()[i].label)
                .count() as f64
                / n
        };
        // expected mean ramp value over each half of the transition: 0.25 and 0.75
        assert!(frac_b(0..1000) < 0.01);
        assert!((frac_b(1000..2000) - 0.25).abs() < 0.05);
        assert!((frac_b(2000..3000) - 0.75).abs() < 0.05);
        assert!(frac_b(3000..4000) > 0.99);
    }

    #[test]
    fn recurring_alternates() {
        let spec = SyntheticDriftSpec {
            kind: DriftKind::Recurring,
            change_points: vec![100],
            transition_width: None,
            period: Some(50),
            ..SyntheticDriftSpec::stationary(0.0, 0)
        };
        assert_eq!(spec.base_concept(99), Concept::A);
        assert_eq!(spec.base_concept(100), Concept::B);
        assert_eq!(spec.base_concept(149), Concept::B);
        assert_eq!(spec.base_concept(150), Concept::A);
        assert_eq!(spec.base_concept(200), Concept::B);
        assert!(generate_synthetic(&spec, 300).is_ok());
    }

    #[test]
    fn spec_errors() {
        let mut s = SyntheticDriftSpec::sudden(vec![500], 0.5, 0);
        assert!(matches!(s.validate(1000), Err(Error::Spec(_))));
        s.noise_rate = 0.49;
        assert!(s.validate(1000).is_ok());
        assert!(s.validate(500).is_err());
        assert!(s.validate(0).is_err());
        s.transition_width = Some(10);
        assert!(s.validate(1000).is_err());
        s.transition_width = None;
        s.change_points = vec![10, 10];
        assert!(s.validate(1000).is_err());
        let g = SyntheticDriftSpec {
            kind: DriftKind::Gradual,
            ..SyntheticDriftSpec::sudden(vec![10], 0.0, 0)
        };
        assert!(g.validate(100).is_err(), "gradual without width");
        assert!(generate_synthetic(&SyntheticDriftSpec::stationary(0.0, 0), 0).is_err());
    }
}
