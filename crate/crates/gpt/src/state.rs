use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::BitString;
use crate::error::{GptError, Result};

/// Extreme lock states: `λ_k` opens on inputs compatible with `k`, `λ_⊥`
/// never opens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LockLabel {
    Key(BitString),
    Bottom,
}

impl fmt::Display for LockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LockLabel::Key(k) => write!(f, "{k}"),
            LockLabel::Bottom => f.write_str("bot"),
        }
    }
}

/// A finite convex combination of extreme points with exact weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mixture<T: Ord> {
    weights: BTreeMap<T, BigRational>,
}

pub type KeyState = Mixture<BitString>;
pub type LockState = Mixture<LockLabel>;
pub type JointState = Mixture<(BitString, LockLabel)>;

impl<T: Ord + Clone + fmt::Debug> Mixture<T> {
    /// Rejects empty input, nonpositive weights, repeated labels and
    /// weights that do not sum to exactly 1.
    pub fn new(pairs: Vec<(T, BigRational)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(GptError::EmptyMixture);
        }
        let mut weights = BTreeMap::new();
        let mut total = BigRational::zero();
        for (label, w) in pairs {
            if w <= BigRational::zero() {
                return Err(GptError::NonPositiveWeight(w));
            }
            total += &w;
            if weights.insert(label.clone(), w).is_some() {
                return Err(GptError::Parse(format!("repeated label {label:?}")));
            }
        }
        if !total.is_one() {
            return Err(GptError::NotNormalized(total));
        }
        Ok(Self { weights })
    }

    pub fn pure(label: T) -> Self {
        Self {
            weights: BTreeMap::from([(label, BigRational::one())]),
        }
    }

    /// `p·a + (1 − p)·b` for `0 ≤ p ≤ 1`.
    pub fn mix(a: &Self, b: &Self, p: &BigRational) -> Result<Self> {
        if *p < BigRational::zero() || *p > BigRational::one() {
            return Err(GptError::NonPositiveWeight(p.clone()));
        }
        let q = BigRational::one() - p;
        let mut weights: BTreeMap<T, BigRational> = BTreeMap::new();
        for (src, scale) in [(a, p), (b, &q)] {
            if scale.is_zero() {
                continue;
            }
            for (label, w) in &src.weights {
                *weights
                    .entry(label.clone())
                    .or_insert_with(BigRational::zero) += w * scale;
            }
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &BTreeMap<T, BigRational> {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &BigRational)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.weights.values().sum()
    }

    /// `Σ w_i f(x_i)`.
    pub fn expectation(&self, mut f: impl FnMut(&T) -> BigRational) -> BigRational {
        self.weights.iter().map(|(x, w)| w * f(x)).sum()
    }
}

impl JointState {
    pub fn product(key: &KeyState, lock: &LockState) -> Self {
        let mut weights = BTreeMap::new();
        for (k, wk) in key.iter() {
            for (l, wl) in lock.iter() {
                weights.insert((*k, *l), wk * wl);
            }
        }
        Self { weights }
    }

    pub fn key_marginal(&self) -> KeyState {
        let mut weights: BTreeMap<BitString, BigRational> = BTreeMap::new();
        for ((k, _), w) in self.iter() {
            *weights.entry(*k).or_insert_with(BigRational::zero) += w;
        }
        Mixture { weights }
    }

    pub fn lock_marginal(&self) -> LockState {
        let mut weights: BTreeMap<LockLabel, BigRational> = BTreeMap::new();
        for ((_, l), w) in self.iter() {
            *weights.entry(*l).or_insert_with(BigRational::zero) += w;
        }
        Mixture { weights }
    }
}
