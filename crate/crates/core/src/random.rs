//! Seeded sampling of Haar unitaries, pure states and random operators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{
    CMatrix, CVector, DensityMatrix, HermitianOperator, Measurement, PovmElement, PureState,
    Unitary, C64,
};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic per-index seed derivation (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Orthonormalizes columns in place by modified Gram-Schmidt with one
/// reorthogonalization pass. Equivalent to the Q factor of a QR
/// decomposition whose R has positive real diagonal.
pub(crate) fn orthonormalize_columns(m: &mut CMatrix) {
    let cols = m.ncols();
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let proj = m.column(k).dotc(&m.column(j));
                let qk = m.column(k).into_owned();
                let mut cj = m.column_mut(j);
                cj.axpy(-proj, &qk, C64::new(1.0, 0.0));
            }
        }
        let norm = m.column(j).norm();
        let mut cj = m.column_mut(j);
        cj /= C64::new(norm, 0.0);
    }
}

pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Unitary {
    let mut g = gaussian_matrix(dim, dim, rng);
    orthonormalize_columns(&mut g);
    Unitary::new_trusted(g)
}

/// Haar-distributed unitary determined by `seed`.
pub fn haar_unitary(dim: usize, seed: u64) -> Unitary {
    assert!(dim >= 1, "dimension must be positive");
    haar_unitary_with(dim, &mut rng_from_seed(seed))
}

/// Uniformly random pure state (normalized complex Gaussian vector).
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Unitary close to the identity: orthonormalized `1 + scale·G`.
pub fn near_identity_unitary<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Unitary {
    let mut m = CMatrix::identity(dim, dim) + gaussian_matrix(dim, dim, rng) * C64::new(scale, 0.0);
    orthonormalize_columns(&mut m);
    Unitary::new_trusted(m)
}

/// GUE-like Hermitian matrix with unit-variance entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    HermitianOperator::symmetrized(gaussian_matrix(dim, dim, rng))
}

/// Random state `G G† / tr(G G†)` with `G` of shape `dim × rank`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(dim, rank.max(1), rng);
    let w = HermitianOperator::symmetrized(&g * g.adjoint());
    let t = w.trace();
    DensityMatrix::project(&(&w * (1.0 / t)))
}

/// Random state of random rank.
pub fn random_density_any_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let rank = rng.random_range(1..=dim);
    random_density(dim, rank, rng)
}

/// Random effect `V diag(u) V†` with Haar `V` and uniform `u ∈ [0,1]`.
pub fn random_effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PovmElement {
    let v = haar_unitary_with(dim, rng);
    let values: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    PovmElement::new_trusted(HermitianOperator::from_eigenpairs(&values, v.matrix()))
}

/// Random POVM with `outcomes` elements: `S^{-1/2} W_i S^{-1/2}` for Wishart `W_i`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Measurement {
    let ws: Vec<HermitianOperator> = (0..outcomes.max(1))
        .map(|_| {
            let g = gaussian_matrix(dim, dim, rng);
            HermitianOperator::symmetrized(&g * g.adjoint())
        })
        .collect();
    let mut sum = HermitianOperator::zeros(dim);
    for w in &ws {
        sum = &sum + w;
    }
    let eig = sum.eigh();
    let inv_sqrt: Vec<f64> = eig
        .values
        .iter()
        .map(|&x| 1.0 / x.max(1e-300).sqrt())
        .collect();
    let s = HermitianOperator::from_eigenpairs(&inv_sqrt, &eig.vectors);
    let elements = ws
        .iter()
        .map(|w| {
            PovmElement::new_trusted(HermitianOperator::symmetrized(
                s.matrix() * w.matrix() * s.matrix(),
            ))
        })
        .collect();
    Measurement::new_trusted(elements)
}

/// Random orthogonal projector of the given rank (span of Haar columns).
pub fn random_projector<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> crate::operator::Projector {
    let u = haar_unitary_with(dim, rng);
    crate::operator::Projector::from_isometry(u.matrix().columns(0, rank).into_owned())
        .expect("Haar columns are orthonormal")
}
