//! Objective functions for bent and k-term homogeneous bent functions.
//!
//! Values are kept as exact integers scaled by `2^n`:
//! `nl * 2^n + (2^n - #max)` for the spectral branch and
//! `-|terms - k| * 2^n` for the penalty branch, so comparisons never tie
//! through rounding and every penalized value sorts below every spectral one.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolfn::{nonlinearity, walsh_hadamard, AnfVector, TruthTable, WalshSpectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessComponents {
    Spectral { nl: u32, max_count: u32 },
    Penalized { penalty: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FitnessValue {
    n: usize,
    scaled: i64,
    components: FitnessComponents,
}

impl FitnessValue {
    pub fn spectral(n: usize, nl: u32, max_count: u32) -> Self {
        let size = 1i64 << n;
        FitnessValue {
            n,
            scaled: nl as i64 * size + (size - max_count as i64),
            components: FitnessComponents::Spectral { nl, max_count },
        }
    }

    pub fn penalized(n: usize, penalty: u32) -> Self {
        FitnessValue {
            n,
            scaled: -(penalty as i64) << n,
            components: FitnessComponents::Penalized { penalty },
        }
    }

    /// Real value; exact since the denominator is a power of two.
    pub fn value(&self) -> f64 {
        self.scaled as f64 / (1u64 << self.n) as f64
    }

    /// Numerator over the denominator `2^n`.
    pub fn scaled(&self) -> i64 {
        self.scaled
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> FitnessComponents {
        self.components
    }

    pub fn nonlinearity(&self) -> Option<u32> {
        match self.components {
            FitnessComponents::Spectral { nl, .. } => Some(nl),
            FitnessComponents::Penalized { .. } => None,
        }
    }
}

impl PartialOrd for FitnessValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FitnessValue {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.n, other.n, "comparing fitness across variable counts");
        self.scaled.cmp(&other.scaled)
    }
}

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.value())
    }
}

/// Number of spectrum entries attaining the maximal absolute value.
pub fn count_max_values(spec: &WalshSpectrum) -> u32 {
    let max = spec.max_abs();
    spec.values()
        .iter()
        .filter(|v| v.unsigned_abs() == max)
        .count() as u32
}

fn from_spectrum(spec: &WalshSpectrum) -> FitnessValue {
    FitnessValue::spectral(spec.n(), nonlinearity(spec), count_max_values(spec))
}

/// `nl + (2^n - #max_values) / 2^n`.
pub fn fit_bent(tt: &TruthTable) -> FitnessValue {
    from_spectrum(&walsh_hadamard(tt))
}

/// `-|terms - k|` when the term count is off, otherwise [`fit_bent`].
pub fn fit_bent_k(anf: &AnfVector, tt: &TruthTable, k: usize) -> FitnessValue {
    Evaluator::new(Objective::BentK(k)).evaluate(tt, anf)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    Bent,
    BentK(usize),
}

/// Applies an objective and counts how many Walsh spectra it computed.
#[derive(Clone, Debug)]
pub struct Evaluator {
    objective: Objective,
    spectra: u64,
}

impl Evaluator {
    pub fn new(objective: Objective) -> Self {
        Evaluator {
            objective,
            spectra: 0,
        }
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn spectra_computed(&self) -> u64 {
        self.spectra
    }

    pub fn evaluate(&mut self, tt: &TruthTable, anf: &AnfVector) -> FitnessValue {
        if let Objective::BentK(k) = self.objective {
            let terms = anf.monomial_count();
            if terms != k {
                return FitnessValue::penalized(tt.n(), terms.abs_diff(k) as u32);
            }
        }
        self.spectra += 1;
        fit_bent(tt)
    }
}
