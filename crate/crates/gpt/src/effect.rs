use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::{BitString, MAX_LEN};
use crate::error::{GptError, Result};
use crate::state::{JointState, KeyState, LockLabel, LockState};

/// `2^{-e}`.
pub(crate) fn pow2_inv(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

fn indicator(b: bool) -> BigRational {
    if b {
        BigRational::one()
    } else {
        BigRational::zero()
    }
}

/// `Σ_{s∈R} E_K^{n,s}`: reads the first `depth` bits of the key and
/// accepts when they lie in `accepted`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyEffect {
    depth: usize,
    accepted: BTreeSet<BitString>,
}

impl KeyEffect {
    pub fn new(depth: usize, accepted: BTreeSet<BitString>) -> Result<Self> {
        if depth > MAX_LEN {
            return Err(GptError::TooLong { len: depth });
        }
        if let Some(s) = accepted.iter().find(|s| s.len() != depth) {
            return Err(GptError::WrongDepth {
                string: s.to_string(),
                depth,
            });
        }
        Ok(Self { depth, accepted })
    }

    pub fn singleton(s: BitString) -> Self {
        Self {
            depth: s.len(),
            accepted: BTreeSet::from([s]),
        }
    }

    /// Accepts every string of the given depth.
    pub fn full(depth: usize) -> Result<Self> {
        Ok(Self {
            depth,
            accepted: BitString::all_of_length(depth)?.into_iter().collect(),
        })
    }

    pub fn unit() -> Self {
        Self::singleton(BitString::EMPTY)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn accepted(&self) -> &BTreeSet<BitString> {
        &self.accepted
    }

    /// Value on the extreme state `κ_k`.
    pub fn value(&self, k: &BitString) -> BigRational {
        let n = self.depth;
        if k.len() >= n {
            indicator(self.accepted.contains(&k.prefix(n)))
        } else {
            let hits = self.accepted.iter().filter(|s| k.is_prefix_of(s)).count();
            BigRational::from_integer(BigInt::from(hits)) * pow2_inv(n - k.len())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LockOutcome {
    Open,
    Closed,
}

/// `E_L^{s,r}`: feed `s` to the lock and report outcome `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LockEffect {
    pub input: BitString,
    pub outcome: LockOutcome,
}

impl LockEffect {
    pub fn open(input: BitString) -> Self {
        Self {
            input,
            outcome: LockOutcome::Open,
        }
    }

    pub fn closed(input: BitString) -> Self {
        Self {
            input,
            outcome: LockOutcome::Closed,
        }
    }

    pub fn value(&self, lock: &LockLabel) -> BigRational {
        let open = open_probability(&self.input, lock);
        match self.outcome {
            LockOutcome::Open => open,
            LockOutcome::Closed => BigRational::one() - open,
        }
    }
}

/// `E_L^{s,✓}(λ)` for an extreme lock state.
pub fn open_probability(s: &BitString, lock: &LockLabel) -> BigRational {
    match lock {
        LockLabel::Bottom => BigRational::zero(),
        LockLabel::Key(k) if s.len() >= k.len() => indicator(k.is_prefix_of(s)),
        LockLabel::Key(k) => {
            if s.is_prefix_of(k) {
                pow2_inv(k.len() - s.len())
            } else {
                BigRational::zero()
            }
        }
    }
}

pub fn lock_eval(s: &BitString, outcome: LockOutcome, lock: &LockState) -> BigRational {
    let effect = LockEffect { input: *s, outcome };
    lock.expectation(|l| effect.value(l))
}

pub fn key_eval(effect: &KeyEffect, key: &KeyState) -> BigRational {
    key.expectation(|k| effect.value(k))
}

pub fn product_effect_eval(key: &KeyEffect, lock: &LockEffect, state: &JointState) -> BigRational {
    state.expectation(|(k, l)| key.value(k) * lock.value(l))
}

/// `Σ_{s∈{0,1}^n} E_K^{n,s}(κ_k) E_L^{s,✓}(λ_l)` in closed form.
pub(crate) fn adaptive_value(n: usize, k: &BitString, l: &LockLabel) -> BigRational {
    let l = match l {
        LockLabel::Bottom => return BigRational::zero(),
        LockLabel::Key(l) => l,
    };
    if k.len() >= n {
        return open_probability(&k.prefix(n), &LockLabel::Key(*l));
    }
    // Key outputs each extension of k with weight 2^{-(n-|k|)}.
    let spread = pow2_inv(n - k.len());
    if n >= l.len() {
        // Extensions s of k with l ⊑ s.
        if l.is_prefix_of(k) {
            BigRational::one()
        } else if k.is_prefix_of(l) {
            spread * BigRational::from_integer(BigInt::one() << (n - l.len()))
        } else {
            BigRational::zero()
        }
    } else if k.is_prefix_of(l) {
        // Only s = l[..n] opens, with probability 2^{-(|l|-n)}.
        spread * pow2_inv(l.len() - n)
    } else {
        BigRational::zero()
    }
}

/// `E_KL^{n,✓}(state)`: read `n` key bits and feed them to the lock.
pub fn adaptive_effect_eval(n: usize, state: &JointState) -> Result<BigRational> {
    if n > MAX_LEN {
        return Err(GptError::TooLong { len: n });
    }
    Ok(state.expectation(|(k, l)| adaptive_value(n, k, l)))
}
