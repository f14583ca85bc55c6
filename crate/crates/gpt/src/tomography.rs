use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::BitString;
use crate::effect::{adaptive_value, KeyEffect, LockEffect, LockOutcome};
use crate::error::{GptError, Result};
use crate::state::{JointState, LockLabel};

pub const TOMOGRAPHY_MAX_LEN: usize = 4;

/// Rank over the rationals. Rows are scaled to integers and kept
/// primitive during elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .filter(|row: &Vec<BigInt>| row.iter().any(|x| !x.is_zero()))
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        let pivot = pivot_row[c].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &pivot - &factor * y;
            }
            let content = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !content.is_zero() && !content.is_one() {
                for x in row.iter_mut() {
                    *x /= &content;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// The effects used for tomography up to `max_len`: key singletons of
/// every depth, lock "open" effects for every input, and the lock unit.
fn key_effects(max_len: usize) -> Result<Vec<KeyEffect>> {
    Ok(BitString::all_up_to(max_len)?
        .into_iter()
        .map(KeyEffect::singleton)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LockRow {
    Open(BitString),
    Unit,
}

impl LockRow {
    fn value(&self, l: &LockLabel) -> BigRational {
        match self {
            LockRow::Open(s) => LockEffect {
                input: *s,
                outcome: LockOutcome::Open,
            }
            .value(l),
            LockRow::Unit => BigRational::one(),
        }
    }
}

fn lock_effects(max_len: usize) -> Result<Vec<LockRow>> {
    let mut out: Vec<LockRow> = BitString::all_up_to(max_len)?
        .into_iter()
        .map(LockRow::Open)
        .collect();
    out.push(LockRow::Unit);
    Ok(out)
}

fn product_rows(states: &[JointState], max_len: usize) -> Result<Vec<Vec<BigRational>>> {
    let keys = key_effects(max_len)?;
    let locks = lock_effects(max_len)?;
    let mut rows = Vec::with_capacity(keys.len() * locks.len());
    for ke in &keys {
        for le in &locks {
            rows.push(
                states
                    .iter()
                    .map(|st| st.expectation(|(k, l)| ke.value(k) * le.value(l)))
                    .collect(),
            );
        }
    }
    Ok(rows)
}

/// Whether product effects up to depth `max_len` tell the given states
/// apart as vectors: full column rank of their evaluation matrix.
pub fn separates(states: &[JointState], max_len: usize) -> Result<bool> {
    check_len(max_len)?;
    Ok(rational_rank(&product_rows(states, max_len)?) == states.len())
}

fn check_len(max_len: usize) -> Result<()> {
    if max_len > TOMOGRAPHY_MAX_LEN {
        return Err(GptError::TooLarge {
            what: "max_len",
            value: max_len,
            cap: TOMOGRAPHY_MAX_LEN,
        });
    }
    Ok(())
}

/// Values of `κ_k = χ_{I_k}/|I_k|` on the `2^L` dyadic cells.
fn key_cells(k: &BitString, max_len: usize) -> Result<Vec<BigRational>> {
    let scale = BigRational::from_integer(BigInt::one() << k.len());
    Ok(BitString::all_of_length(max_len)?
        .iter()
        .map(|cell| {
            if k.is_prefix_of(cell) {
                scale.clone()
            } else {
                BigRational::zero()
            }
        })
        .collect())
}

/// `(f, c)` for a lock extreme: `f` on the dyadic cells, then `c = 1`.
fn lock_cells(l: &LockLabel, max_len: usize) -> Result<Vec<BigRational>> {
    let mut v: Vec<BigRational> = BitString::all_of_length(max_len)?
        .iter()
        .map(|cell| match l {
            LockLabel::Key(k) if k.is_prefix_of(cell) => BigRational::one(),
            _ => BigRational::zero(),
        })
        .collect();
    v.push(BigRational::one());
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TomographyReport {
    pub max_len: usize,
    pub joint_states: usize,
    /// Dimension of the span of the truncated key states, from their
    /// step-function representation.
    pub key_dimension: usize,
    pub lock_dimension: usize,
    /// Rank of the product-effect evaluation matrix on all joint extremes.
    pub product_rank: usize,
    /// Same, with the adaptive effects `E_KL^{n,✓}` appended as rows.
    pub joint_rank: usize,
}

impl TomographyReport {
    pub fn passed(&self) -> bool {
        self.product_rank == self.key_dimension * self.lock_dimension
            && self.joint_rank == self.product_rank
    }
}

/// Compares how many independent joint states product effects detect
/// with the dimension of the joint state span.
pub fn tomography_report(max_len: usize) -> Result<TomographyReport> {
    check_len(max_len)?;
    let keys = BitString::all_up_to(max_len)?;
    let mut locks: Vec<LockLabel> = keys.iter().copied().map(LockLabel::Key).collect();
    locks.push(LockLabel::Bottom);

    let key_vectors: Vec<Vec<BigRational>> = keys
        .iter()
        .map(|k| key_cells(k, max_len))
        .collect::<Result<_>>()?;
    let lock_vectors: Vec<Vec<BigRational>> = locks
        .iter()
        .map(|l| lock_cells(l, max_len))
        .collect::<Result<_>>()?;
    let key_dimension = rational_rank(&key_vectors);
    let lock_dimension = rational_rank(&lock_vectors);

    let states: Vec<JointState> = keys
        .iter()
        .flat_map(|k| locks.iter().map(move |l| JointState::pure((*k, *l))))
        .collect();
    let mut rows = product_rows(&states, max_len)?;
    let product_rank = rational_rank(&rows);
    for n in 0..=max_len {
        rows.push(
            states
                .iter()
                .map(|st| st.expectation(|(k, l)| adaptive_value(n, k, l)))
                .collect(),
        );
    }
    let joint_rank = rational_rank(&rows);
    Ok(TomographyReport {
        max_len,
        joint_states: states.len(),
        key_dimension,
        lock_dimension,
        product_rank,
        joint_rank,
    })
}

pub fn local_tomography_check(max_len: usize) -> Result<bool> {
    Ok(tomography_report(max_len)?.passed())
}
