//! Flat and triangular spectra, the spectral 1-distance, and states built
//! from traceless witnesses.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::{pos_neg_parts, DensityMatrix, HermitianOperator};
use crate::tol::tolerances;

/// Largest `n` accepted by [`airplane_scan`].
pub const AIRPLANE_MAX_N: usize = 1 << 12;

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_fits(what: &'static str, value: usize, dim: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::InvalidArgument(format!("{what} must be positive")));
    }
    if value > dim {
        return Err(Error::TooLarge {
            what,
            value,
            cap: dim,
        });
    }
    Ok(())
}

/// Weights `1/m` on the first `m` of `len` slots.
pub fn flat_spectrum(m: usize, len: usize) -> Result<Vec<BigRational>> {
    check_fits("m", m, len)?;
    Ok((0..len)
        .map(|k| {
            if k < m {
                ratio(1, m as i64)
            } else {
                BigRational::zero()
            }
        })
        .collect())
}

/// Weights `2(n − k)/(n(n + 1))` on the first `n` of `len` slots.
pub fn triangular_spectrum(n: usize, len: usize) -> Result<Vec<BigRational>> {
    check_fits("n", n, len)?;
    let den = (n * (n + 1)) as i64;
    Ok((0..len)
        .map(|k| {
            if k < n {
                ratio(2 * (n - k) as i64, den)
            } else {
                BigRational::zero()
            }
        })
        .collect())
}

fn diagonal_state(weights: &[BigRational]) -> DensityMatrix {
    let w: Vec<f64> = weights.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    DensityMatrix::new_trusted(HermitianOperator::from_real_diagonal(&w))
}

/// `(1/m) Σ_{k<m} |k⟩⟨k|`.
pub fn flat_state(m: usize, dim: usize) -> Result<DensityMatrix> {
    Ok(diagonal_state(&flat_spectrum(m, dim)?))
}

/// `Σ_{k<n} 2(n − k)/(n(n + 1)) |k⟩⟨k|`.
pub fn triangular_state(n: usize, dim: usize) -> Result<DensityMatrix> {
    Ok(diagonal_state(&triangular_spectrum(n, dim)?))
}

fn sorted_padded(p: &[f64], len: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.resize(len, 0.0);
    v
}

/// `Σ |p_i − q_i|` after sorting both descending and zero-padding.
pub fn spectral_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    sorted_padded(p, len)
        .iter()
        .zip(sorted_padded(q, len))
        .map(|(a, b)| (a - b).abs())
        .sum()
}

/// Exact variant of [`spectral_distance`].
pub fn spectral_distance_exact(p: &[BigRational], q: &[BigRational]) -> BigRational {
    let len = p.len().max(q.len());
    let prep = |v: &[BigRational]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.cmp(a));
        v.resize(len, BigRational::zero());
        v
    };
    prep(p)
        .iter()
        .zip(prep(q))
        .map(|(a, b)| (a - b).abs())
        .fold(BigRational::zero(), |acc, x| acc + x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirplaneScan {
    pub n: usize,
    /// Exact minimum over `m ∈ {1, …, 4n}` of `‖spec σ^(n) − spec ρ^(m)‖_1`.
    pub min: BigRational,
    pub argmin: usize,
}

impl AirplaneScan {
    pub fn min_f64(&self) -> f64 {
        self.min.to_f64().unwrap_or(f64::NAN)
    }
}

/// Numerator of the spectral distance over the common denominator
/// `n(n + 1)m`.
fn scaled_distance(n: usize, m: usize) -> i128 {
    let (n_, m_) = (n as i128, m as i128);
    let flat = n_ * (n_ + 1);
    (0..n.max(m))
        .map(|k| {
            let k_ = k as i128;
            let t = if k < n { 2 * (n_ - k_) * m_ } else { 0 };
            let f = if k < m { flat } else { 0 };
            (t - f).abs()
        })
        .sum()
}

/// Scans all flat spectra against the triangular one, exactly.
pub fn airplane_scan(n: usize) -> Result<AirplaneScan> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > AIRPLANE_MAX_N {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            cap: AIRPLANE_MAX_N,
        });
    }
    let mut best = (scaled_distance(n, 1), 1usize);
    for m in 2..=4 * n {
        let s = scaled_distance(n, m);
        // s/m < best.0/best.1 without division.
        if (s * best.1 as i128).cmp(&(best.0 * m as i128)) == Ordering::Less {
            best = (s, m);
        }
    }
    let den = BigInt::from(n) * BigInt::from(n + 1) * BigInt::from(best.1);
    Ok(AirplaneScan {
        n,
        min: BigRational::new(BigInt::from(best.0), den),
        argmin: best.1,
    })
}

/// A Hermitian operator of zero trace whose positive part has trace at
/// most 1/11.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessWitness {
    a: HermitianOperator,
    positive: HermitianOperator,
    negative: HermitianOperator,
}

/// Bound on `tr A_+` for witnesses.
pub const WITNESS_BOUND: f64 = 1.0 / 11.0;

impl TracelessWitness {
    pub fn new(a: HermitianOperator) -> Result<Self> {
        let trace = a.trace();
        if trace.abs() > tolerances().hermitian {
            return Err(Error::InvalidWitness(format!("trace {trace} is not zero")));
        }
        let (positive, negative) = pos_neg_parts(&a);
        let tp = positive.trace();
        if tp > WITNESS_BOUND + tolerances().hermitian {
            return Err(Error::InvalidWitness(format!(
                "positive part has trace {tp} > 1/11"
            )));
        }
        Ok(Self {
            a,
            positive,
            negative,
        })
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// `ρ = |p⟩⟨p|(1 − tr A_+) + A_+`, `σ = |p⟩⟨p|(1 + tr A_−) − A_−`, on a
/// space of dimension `max(dim A, p + 1)`, so that `ρ − σ = A`.
pub fn witness_pair(
    witness: &TracelessWitness,
    pointer: usize,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let dim = witness.dim().max(pointer + 1);
    let pos = witness.positive.embed(dim)?;
    let neg = witness.negative.embed(dim)?;
    let mut diag = vec![0.0; dim];
    diag[pointer] = 1.0;
    let p = HermitianOperator::from_real_diagonal(&diag);
    let rho = &(&p * (1.0 - pos.trace())) + &pos;
    let sigma = &(&p * (1.0 + neg.trace())) - &neg;
    Ok((DensityMatrix::new(rho)?, DensityMatrix::new(sigma)?))
}

/// Random element of the witness set: a traceless Hermitian matrix
/// rescaled so that its positive part has trace `scale ≤ 1/11`.
pub fn random_witness<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> TracelessWitness {
    loop {
        let g = crate::random::random_hermitian(dim, rng);
        let shift = g.trace() / dim as f64;
        let traceless = &g - &(&HermitianOperator::identity(dim) * shift);
        let (pos, _) = pos_neg_parts(&traceless);
        let tp = pos.trace();
        if tp <= 1e-9 {
            continue;
        }
        let scale = WITNESS_BOUND * rng.random::<f64>();
        let a = &traceless * (scale / tp);
        // Re-zero the trace after rescaling to stay within 1e-12.
        let residual = a.trace() / dim as f64;
        let a = &a - &(&HermitianOperator::identity(dim) * residual);
        if let Ok(w) = TracelessWitness::new(a) {
            return w;
        }
    }
}

/// `(1/11)(|0⟩⟨0| − |1⟩⟨1|)` on the given dimension.
pub fn basic_witness(dim: usize) -> Result<TracelessWitness> {
    if dim < 2 {
        return Err(Error::InvalidArgument("witness needs dim >= 2".into()));
    }
    let mut diag = vec![0.0; dim];
    diag[0] = WITNESS_BOUND;
    diag[1] = -WITNESS_BOUND;
    TracelessWitness::new(HermitianOperator::from_real_diagonal(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::trace_distance;
    use crate::operator::{spectrum, trace_norm};

    fn r(a: i64, b: i64) -> BigRational {
        ratio(a, b)
    }

    #[test]
    fn flat_and_triangular() {
        assert_eq!(spectrum(&flat_state(1, 3).unwrap()), vec![1.0, 0.0, 0.0]);
        assert!(
            flat_state(4, 4)
                .unwrap()
                .max_abs_diff(&DensityMatrix::maximally_mixed(4))
                < 1e-15
        );
        assert_eq!(
            flat_spectrum(3, 4).unwrap(),
            vec![r(1, 3), r(1, 3), r(1, 3), r(0, 1)]
        );
        assert_eq!(triangular_spectrum(2, 2).unwrap(), vec![r(2, 3), r(1, 3)]);
        assert_eq!(
            triangular_spectrum(4, 4).unwrap(),
            vec![r(2, 5), r(3, 10), r(1, 5), r(1, 10)]
        );
        for n in [1, 7, 64, 1 << 12] {
            let s: BigRational = triangular_spectrum(n, n).unwrap().into_iter().sum();
            assert_eq!(s, r(1, 1));
        }
        assert!(matches!(flat_state(5, 4), Err(Error::TooLarge { .. })));
        assert!(matches!(
            triangular_state(5, 4),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn spectral_distance_examples() {
        assert_eq!(spectral_distance(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!(
            (spectral_distance(&[2.0 / 3.0, 1.0 / 3.0], &[0.5, 0.5]) - 1.0 / 3.0).abs() < 1e-15
        );
        assert_eq!(
            spectral_distance_exact(
                &triangular_spectrum(4, 4).unwrap(),
                &flat_spectrum(3, 4).unwrap()
            ),
            r(1, 3)
        );
    }

    #[test]
    fn airplane_matches_direct_sum() {
        for n in [1, 2, 3, 4, 7, 16] {
            let scan = airplane_scan(n).unwrap();
            let mut best: Option<(BigRational, usize)> = None;
            for m in 1..=4 * n {
                let len = n.max(m);
                let d = spectral_distance_exact(
                    &triangular_spectrum(n, len).unwrap(),
                    &flat_spectrum(m, len).unwrap(),
                );
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, m));
                }
            }
            let (min, argmin) = best.unwrap();
            assert_eq!(scan.min, min, "n = {n}");
            assert_eq!(scan.argmin, argmin, "n = {n}");
        }
        assert_eq!(airplane_scan(4).unwrap().min, r(1, 3));
    }

    #[test]
    fn witness_examples() {
        let w = basic_witness(2).unwrap();
        let (rho, sigma) = witness_pair(&w, 2).unwrap();
        let e = 1.0 / 11.0;
        assert!(
            rho.max_abs_diff(&HermitianOperator::from_real_diagonal(&[e, 0.0, 10.0 * e])) < 1e-15
        );
        assert!(
            sigma.max_abs_diff(&HermitianOperator::from_real_diagonal(&[0.0, e, 10.0 * e])) < 1e-15
        );
        let zero = TracelessWitness::new(HermitianOperator::zeros(3)).unwrap();
        let (rho, sigma) = witness_pair(&zero, 1).unwrap();
        assert_eq!(rho, DensityMatrix::basis_state(3, 1));
        assert_eq!(sigma, DensityMatrix::basis_state(3, 1));
        let bad = HermitianOperator::from_real_diagonal(&[0.2, -0.2]);
        assert!(matches!(
            TracelessWitness::new(bad),
            Err(Error::InvalidWitness(_))
        ));
        let bad = HermitianOperator::from_real_diagonal(&[0.05, 0.0]);
        assert!(matches!(
            TracelessWitness::new(bad),
            Err(Error::InvalidWitness(_))
        ));
    }

    #[test]
    fn random_witness_pairs() {
        let mut rng = crate::random::rng_from_seed(8);
        for _ in 0..50 {
            let w = random_witness(8, &mut rng);
            let (rho, sigma) = witness_pair(&w, 3).unwrap();
            let diff = &(rho.operator() - sigma.operator()) - w.operator();
            assert!(trace_norm(&diff) < 1e-10);
            let d = trace_distance(&rho, &sigma).unwrap();
            assert!((d - trace_norm(w.operator()) / 2.0).abs() < 1e-10);
        }
    }
}
