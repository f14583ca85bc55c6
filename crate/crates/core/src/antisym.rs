//! The antisymmetric state on `C^{2^n} ⊗ C^{2^n}` and its statistics
//! under local rank-one measurements.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::metrics::{
    d_m, distance_to_family_with, statistical_distance, FamilyKind, FamilyMetric,
    MeasurementFamily, OptimizerConfig, Side, StateFamily, SupStrategy,
};
use crate::operator::{
    born_rule_product, reduce_left, CMatrix, DensityMatrix, HermitianOperator, Measurement,
    ProbabilityVector, ProductMeasurement, PureState, Unitary, C64,
};

/// Largest `n` for which the `2^{2n}`-dimensional state is built densely.
pub const MAX_N: usize = 5;

fn check_n(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > MAX_N {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            cap: MAX_N,
        });
    }
    Ok(1 << n)
}

/// `SWAP |i⟩|j⟩ = |j⟩|i⟩` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> HermitianOperator {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    HermitianOperator::symmetrized(m)
}

/// `(1 − SWAP) / (d(d − 1))` with `d = 2^n`.
pub fn antisymmetric_state(n: usize) -> Result<DensityMatrix> {
    let d = check_n(n)?;
    let norm = 1.0 / (d * (d - 1)) as f64;
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                m[(i * d + j, i * d + j)] += C64::new(norm, 0.0);
                m[(j * d + i, i * d + j)] -= C64::new(norm, 0.0);
            }
        }
    }
    Ok(DensityMatrix::new_trusted(HermitianOperator::symmetrized(
        m,
    )))
}

/// `Σ_{u<v} π_{u,v}` over the computational basis, each `π_{u,v}` the
/// projector onto `(|uv⟩ − |vu⟩)/√2`.
pub fn pair_projector_sum(n: usize) -> Result<HermitianOperator> {
    let d = check_n(n)?;
    let mut m = CMatrix::zeros(d * d, d * d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for u in 0..d {
        for v in (u + 1)..d {
            let mut w = crate::operator::CVector::zeros(d * d);
            w[u * d + v] = C64::new(h, 0.0);
            w[v * d + u] = C64::new(-h, 0.0);
            m += &w * w.adjoint();
        }
    }
    Ok(HermitianOperator::symmetrized(m))
}

/// Outcome distribution of measuring in the basis `U ⊗ U`; outcome
/// `(x, y)` sits at index `x · 2^n + y`.
pub fn product_basis_distribution(n: usize, u: &Unitary) -> Result<ProbabilityVector> {
    let d = check_n(n)?;
    if u.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.dim(),
        });
    }
    let rho = antisymmetric_state(n)?;
    let m = Measurement::from_basis(u);
    born_rule_product(&ProductMeasurement::new(m.clone(), m), &rho)
}

/// Statistical distance between the computational-basis product
/// distribution and the uniform product distribution.
pub fn product_representation_gap(n: usize) -> Result<f64> {
    let d = check_n(n)?;
    let p = product_basis_distribution(n, &Unitary::identity(d))?;
    statistical_distance(&p, &ProbabilityVector::uniform(d * d))
}

/// The same gap summed exactly from the closed-form distribution
/// (0 on the diagonal, `1/(d(d−1))` off it).
pub fn product_representation_gap_exact(n: usize) -> Result<BigRational> {
    let d = check_n(n)? as i64;
    let uniform = BigRational::new(BigInt::from(1), BigInt::from(d * d));
    let off = BigRational::new(BigInt::from(1), BigInt::from(d * (d - 1)));
    let mut total = BigRational::zero();
    for x in 0..d {
        for y in 0..d {
            let p = if x == y {
                BigRational::zero()
            } else {
                off.clone()
            };
            total += (p - &uniform).abs();
        }
    }
    Ok(total / BigInt::from(2))
}

/// State of the second system after outcome `|x⟩` on the first.
pub fn conditional_state(n: usize, x: &PureState) -> Result<DensityMatrix> {
    let d = check_n(n)?;
    if x.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.dim(),
        });
    }
    let rho = antisymmetric_state(n)?;
    let e = HermitianOperator::projector(x);
    let reduced = HermitianOperator::symmetrized(reduce_left(rho.matrix(), e.matrix(), d, d));
    let p = reduced.trace();
    DensityMatrix::new(&reduced * (1.0 / p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub n: usize,
    /// Sampled lower bound on `d_{M⊗M}(ρ^(n), 1/2^n ⊗ 1/2^n)`.
    pub d_product: f64,
    /// `2^{-n}`.
    pub gap: f64,
    /// Optimizer upper bound on `δ(ρ^(n), Σ^rand)`, for `n ≤ 3`.
    pub delta: Option<f64>,
    pub delta_converged: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapTableConfig {
    pub samples: usize,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    /// Largest `n` for which the trace-distance column is optimized.
    pub delta_n_max: usize,
}

impl Default for GapTableConfig {
    fn default() -> Self {
        Self {
            samples: 20,
            seed: 0,
            optimizer: OptimizerConfig::default(),
            delta_n_max: 3,
        }
    }
}

pub fn robustness_gap_table(n_max: usize, config: &GapTableConfig) -> Result<Vec<GapRow>> {
    check_n(n_max)?;
    (1..=n_max)
        .map(|n| {
            let d = 1usize << n;
            let rho = antisymmetric_state(n)?;
            let uniform = DensityMatrix::maximally_mixed(d * d);
            let family = MeasurementFamily::new(
                FamilyKind::MatchedRank1Bases { dim: d },
                SupStrategy::Sample {
                    count: config.samples,
                    seed: config.seed,
                    refine_steps: 0,
                },
            )?;
            let d_product = d_m(&rho, &uniform, &family)?.value;
            let (delta, delta_converged) = if n <= config.delta_n_max.min(3) {
                let sigma_rand = StateFamily::ProductWithFreeFactor {
                    fixed: DensityMatrix::maximally_mixed(d),
                    side: Side::Left,
                    free_dim: d,
                };
                let r = distance_to_family_with(
                    &rho,
                    &sigma_rand,
                    FamilyMetric::Trace,
                    &config.optimizer,
                )?;
                (Some(r.value), Some(r.converged))
            } else {
                (None, None)
            };
            Ok(GapRow {
                n,
                d_product,
                gap: 1.0 / d as f64,
                delta,
                delta_converged,
            })
        })
        .collect()
}
