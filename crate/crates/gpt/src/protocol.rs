use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bits::BitString;
use crate::effect::{adaptive_effect_eval, pow2_inv, KeyEffect, LockEffect, LockOutcome};
use crate::error::{GptError, Result};
use crate::state::{JointState, LockLabel, Mixture};

pub const CORRELATED_MAX_N: usize = 16;
pub const PRODUCT_MAX_N: usize = 12;

fn cap(what: &'static str, value: usize, cap: usize) -> Result<()> {
    if value > cap {
        return Err(GptError::TooLarge { what, value, cap });
    }
    Ok(())
}

/// `2^{-n} Σ_{|k|=n} κ_k ⊗ λ_k`.
pub fn correlated_state(n: usize) -> Result<JointState> {
    cap("n", n, CORRELATED_MAX_N)?;
    let w = pow2_inv(n);
    Mixture::new(
        BitString::all_of_length(n)?
            .into_iter()
            .map(|k| ((k, LockLabel::Key(k)), w.clone()))
            .collect(),
    )
}

/// `κ_∅ ⊗ λ_⊥`.
pub fn empty_bottom_state() -> JointState {
    JointState::pure((BitString::EMPTY, LockLabel::Bottom))
}

/// Statistical distance of `{E_KL^{n,✓}, 1 − E_KL^{n,✓}}` between two states.
pub fn adaptive_binary_distance(n: usize, a: &JointState, b: &JointState) -> Result<BigRational> {
    Ok((adaptive_effect_eval(n, a)? - adaptive_effect_eval(n, b)?).abs())
}

/// `δ` witnessed by the adaptive measurement between `ρ_KL^(n)` and `κ_∅ ⊗ λ_⊥`.
pub fn adaptive_distance(n: usize) -> Result<BigRational> {
    adaptive_binary_distance(n, &correlated_state(n)?, &empty_bottom_state())
}

/// Outcome masses of a product measurement (key read to `depth`, lock fed
/// `s`) as differences between two states. A key prefix shorter than
/// `depth` stands for mass spread uniformly over its extensions.
fn cylinder_differences(
    depth: usize,
    s: &BitString,
    a: &JointState,
    b: &JointState,
) -> [BTreeMap<BitString, BigRational>; 2] {
    let mut maps = [BTreeMap::new(), BTreeMap::new()];
    for (state, sign) in [(a, false), (b, true)] {
        for ((k, l), w) in state.iter() {
            let prefix = k.prefix(depth);
            for (slot, outcome) in [LockOutcome::Open, LockOutcome::Closed]
                .into_iter()
                .enumerate()
            {
                let p = (LockEffect { input: *s, outcome }).value(l);
                if p.is_zero() {
                    continue;
                }
                let mass = w * p;
                let entry = maps[slot].entry(prefix).or_insert_with(BigRational::zero);
                if sign {
                    *entry -= mass;
                } else {
                    *entry += mass;
                }
            }
        }
    }
    maps
}

/// `Σ_{|t|=depth} |f(t)|` with `f(t) = Σ_{p ⊑ t} diff_p 2^{-(depth−|p|)}`,
/// splitting only at prefixes that have stored descendants.
fn cylinder_l1(depth: usize, diffs: &BTreeMap<BitString, BigRational>) -> BigRational {
    let mut internal: HashSet<BitString> = HashSet::new();
    for p in diffs.keys() {
        for j in 0..p.len() {
            internal.insert(p.prefix(j));
        }
    }
    fn walk(
        p: BitString,
        density: BigRational,
        depth: usize,
        diffs: &BTreeMap<BitString, BigRational>,
        internal: &HashSet<BitString>,
    ) -> BigRational {
        let density = match diffs.get(&p) {
            Some(d) => density + d * pow2_inv(depth - p.len()),
            None => density,
        };
        if !internal.contains(&p) {
            let leaves = BigRational::from_integer(BigInt::from(1) << (depth - p.len()));
            return density.abs() * leaves;
        }
        let mut total = BigRational::zero();
        for bit in [false, true] {
            let child = p.push(bit).expect("prefix below depth");
            total += walk(child, density.clone(), depth, diffs, internal);
        }
        total
    }
    walk(
        BitString::EMPTY,
        BigRational::zero(),
        depth,
        diffs,
        &internal,
    )
}

/// Both states of a comparison rescaled to integers once, so that each
/// lock input only costs a sweep over sorted leaf intervals.
struct ScaledPair {
    depth: usize,
    /// Common denominator of the mixture weights.
    den: BigInt,
    /// Longest lock label; open probabilities are scaled by `2^lock_shift`.
    lock_shift: usize,
    /// `(prefix, lock, signed weight numerator)`.
    entries: Vec<(BitString, LockLabel, i128)>,
    /// `(leaf position, entry index, opening)` sorted by position.
    events: Vec<(u128, usize, bool)>,
}

fn leaf_interval(p: &BitString, depth: usize) -> (u128, u128) {
    let mut lo: u128 = 0;
    for i in 0..p.len() {
        if p.bit(i) {
            lo |= 1u128 << (depth - 1 - i);
        }
    }
    (lo, lo + (1u128 << (depth - p.len())))
}

impl ScaledPair {
    fn new(depth: usize, a: &JointState, b: &JointState) -> Option<Self> {
        let den = a
            .iter()
            .chain(b.iter())
            .fold(BigInt::from(1), |acc, (_, w)| acc.lcm(w.denom()));
        let lock_shift = a
            .iter()
            .chain(b.iter())
            .map(|((_, l), _)| match l {
                LockLabel::Key(k) => k.len(),
                LockLabel::Bottom => 0,
            })
            .max()
            .unwrap_or(0);
        let mut entries = Vec::new();
        for (state, sign) in [(a, 1i128), (b, -1i128)] {
            for ((k, l), w) in state.iter() {
                let numer: i128 = (w.numer() * (&den / w.denom())).try_into().ok()?;
                entries.push((k.prefix(depth), *l, sign * numer));
            }
        }
        let mut events = Vec::with_capacity(2 * entries.len());
        for (i, (p, _, _)) in entries.iter().enumerate() {
            let (lo, hi) = leaf_interval(p, depth);
            events.push((lo, i, true));
            events.push((hi, i, false));
        }
        events.sort_unstable();
        Some(Self {
            depth,
            den,
            lock_shift,
            entries,
            events,
        })
    }

    /// `2^lock_shift · E_L^{s,✓}(λ)`.
    fn open_scaled(&self, s: &BitString, l: &LockLabel) -> i128 {
        match l {
            LockLabel::Bottom => 0,
            LockLabel::Key(k) if s.len() >= k.len() => {
                if k.is_prefix_of(s) {
                    1i128 << self.lock_shift
                } else {
                    0
                }
            }
            LockLabel::Key(k) => {
                if s.is_prefix_of(k) {
                    1i128 << (self.lock_shift - (k.len() - s.len()))
                } else {
                    0
                }
            }
        }
    }

    fn l1(&self, s: &BitString) -> Option<BigRational> {
        let full = 1i128.checked_shl(self.lock_shift as u32)?;
        // Per-leaf densities scaled by 2^depth: mass · 2^{|p|}.
        let mut open = Vec::with_capacity(self.entries.len());
        let mut closed = Vec::with_capacity(self.entries.len());
        for (p, l, w) in &self.entries {
            let o = self.open_scaled(s, l);
            let scale = 1i128.checked_shl(p.len() as u32)?;
            open.push(w.checked_mul(o)?.checked_mul(scale)?);
            closed.push(w.checked_mul(full - o)?.checked_mul(scale)?);
        }
        let mut total: i128 = 0;
        let (mut d_open, mut d_closed) = (0i128, 0i128);
        let mut i = 0;
        while i < self.events.len() {
            let pos = self.events[i].0;
            while i < self.events.len() && self.events[i].0 == pos {
                let (_, idx, opening) = self.events[i];
                if opening {
                    d_open = d_open.checked_add(open[idx])?;
                    d_closed = d_closed.checked_add(closed[idx])?;
                } else {
                    d_open = d_open.checked_sub(open[idx])?;
                    d_closed = d_closed.checked_sub(closed[idx])?;
                }
                i += 1;
            }
            if let Some(&(next, _, _)) = self.events.get(i) {
                let width = i128::try_from(next - pos).ok()?;
                let mass = d_open.checked_abs()?.checked_add(d_closed.checked_abs()?)?;
                total = total.checked_add(mass.checked_mul(width)?)?;
            }
        }
        let scale = (&self.den << self.lock_shift) << self.depth;
        Some(BigRational::new(BigInt::from(total), scale))
    }
}

/// Outcome 1-norm of the finest product measurement `{E_K^{depth,t} ⊗ E_L^{s,r}}`
/// between two states.
pub fn product_outcome_l1(
    depth: usize,
    s: &BitString,
    a: &JointState,
    b: &JointState,
) -> Result<BigRational> {
    cap("key depth", depth, crate::bits::MAX_LEN)?;
    if let Some(v) = ScaledPair::new(depth, a, b).and_then(|p| p.l1(s)) {
        return Ok(v);
    }
    let [open, closed] = cylinder_differences(depth, s, a, b);
    Ok(cylinder_l1(depth, &open) + cylinder_l1(depth, &closed))
}

/// Outcome 1-norm of a coarse-grained product measurement: the key outcomes
/// of depth `depth` are merged into the given blocks.
pub fn partition_outcome_l1(
    blocks: &[BTreeSet<BitString>],
    s: &BitString,
    a: &JointState,
    b: &JointState,
) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for block in blocks {
        let depth = block.iter().next().map_or(0, |t| t.len());
        let key = KeyEffect::new(depth, block.clone())?;
        for outcome in [LockOutcome::Open, LockOutcome::Closed] {
            let lock = LockEffect { input: *s, outcome };
            let pa = crate::effect::product_effect_eval(&key, &lock, a);
            let pb = crate::effect::product_effect_eval(&key, &lock, b);
            total += (pa - pb).abs();
        }
    }
    Ok(total)
}

/// Maximum over `s ∈ {0,1}^n` of the finest product-measurement 1-norm
/// between `ρ_KL^(n)` and `κ_∅ ⊗ λ_⊥`, with the maximizing input.
pub fn product_family_distance_with_input(n: usize) -> Result<(BigRational, BitString)> {
    cap("n", n, PRODUCT_MAX_N)?;
    let rho = correlated_state(n)?;
    let target = empty_bottom_state();
    let scaled = ScaledPair::new(n, &rho, &target);
    let mut best: Option<(BigRational, BitString)> = None;
    for s in BitString::all_of_length(n)? {
        let v = match scaled.as_ref().and_then(|p| p.l1(&s)) {
            Some(v) => v,
            None => product_outcome_l1(n, &s, &rho, &target)?,
        };
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, s));
        }
    }
    Ok(best.expect("at least one input"))
}

pub fn product_family_distance(n: usize) -> Result<BigRational> {
    Ok(product_family_distance_with_input(n)?.0)
}
