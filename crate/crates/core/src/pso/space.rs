use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance kept from an open bound.
pub const OPEN_BOUND_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimKind {
    Integer,
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dim {
    pub name: String,
    pub kind: DimKind,
    pub low: f64,
    pub high: f64,
    #[serde(default)]
    pub open_low: bool,
    #[serde(default)]
    pub open_high: bool,
}

impl Dim {
    pub fn integer(name: &str, low: f64, high: f64) -> Self {
        Dim {
            name: name.to_string(),
            kind: DimKind::Integer,
            low,
            high,
            open_low: false,
            open_high: false,
        }
    }

    pub fn real(name: &str, low: f64, high: f64) -> Self {
        Dim {
            kind: DimKind::Real,
            ..Dim::integer(name, low, high)
        }
    }

    /// Real interval open at both ends.
    pub fn open(name: &str, low: f64, high: f64) -> Self {
        Dim {
            open_low: true,
            open_high: true,
            ..Dim::real(name, low, high)
        }
    }

    /// Closed interval that positions are clamped into.
    pub fn effective_bounds(&self) -> (f64, f64) {
        let lo = if self.open_low { self.low + OPEN_BOUND_EPS } else { self.low };
        let hi = if self.open_high { self.high - OPEN_BOUND_EPS } else { self.high };
        if lo > hi {
            let mid = self.low + (self.high - self.low) / 2.0;
            (mid, mid)
        } else {
            (lo, hi)
        }
    }

    pub fn clamp(&self, x: f64) -> f64 {
        let (lo, hi) = self.effective_bounds();
        x.clamp(lo, hi)
    }

    /// Value handed to the objective: clamped, and rounded for integers.
    pub fn decode(&self, x: f64) -> f64 {
        let x = self.clamp(x);
        match self.kind {
            DimKind::Real => x,
            DimKind::Integer => {
                let (lo, hi) = self.effective_bounds();
                let (lo, hi) = (lo.ceil(), hi.floor());
                if lo > hi {
                    x.round()
                } else {
                    x.round().clamp(lo, hi)
                }
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.open_low { x > self.low } else { x >= self.low };
        let below = if self.open_high { x < self.high } else { x <= self.high };
        above && below
    }

    pub fn range(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperParamSpace {
    pub dims: Vec<Dim>,
}

impl HyperParamSpace {
    pub fn new(dims: Vec<Dim>) -> Result<Self> {
        let space = HyperParamSpace { dims };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::param("search space has no dimensions"));
        }
        let mut names = BTreeSet::new();
        for d in &self.dims {
            if !(d.low.is_finite() && d.high.is_finite() && d.low < d.high) {
                return Err(Error::param(format!(
                    "dimension {:?} needs finite low < high (got {}, {})",
                    d.name, d.low, d.high
                )));
            }
            if !names.insert(d.name.as_str()) {
                return Err(Error::param(format!("duplicate dimension {:?}", d.name)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.dims.iter().map(|d| d.name.as_str())
    }

    pub fn position_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    pub fn decode(&self, position: &[f64]) -> Vec<f64> {
        self.dims.iter().zip(position).map(|(d, &x)| d.decode(x)).collect()
    }

    /// Checks that the space has exactly the named dimensions, in any order.
    pub fn require(&self, names: &[&str]) -> Result<()> {
        let have: BTreeSet<&str> = self.names().collect();
        let want: BTreeSet<&str> = names.iter().copied().collect();
        if have != want {
            return Err(Error::param(format!(
                "search space must have exactly the dimensions {want:?}, found {have:?}"
            )));
        }
        Ok(())
    }

    /// Default ranges of the five boosted-tree tunables.
    pub fn classifier_ranges() -> Self {
        HyperParamSpace {
            dims: vec![
                Dim::integer("n_estimators", 50.0, 500.0),
                Dim::integer("max_depth", 5.0, 50.0),
                Dim::open("learning_rate", 0.0, 1.0),
                Dim::integer("num_leaves", 100.0, 2000.0),
                Dim::integer("min_data_in_leaf", 10.0, 50.0),
            ],
        }
    }

    /// Default ranges of the four drift-adaptation tunables.
    pub fn oasw_ranges() -> Self {
        HyperParamSpace {
            dims: vec![
                Dim::open("alpha", 0.95, 1.0),
                Dim::open("beta", 0.90, 1.0),
                Dim::integer("t", 100.0, 1000.0),
                Dim::integer("t_prime_max", 500.0, 5000.0),
            ],
        }
    }
}
