//! Deviation functions `D` under Haar conjugation, their Lipschitz and
//! average bounds, and the randomized search for a unitary that keeps
//! every element of a finite effect set below its threshold.

use crate::error::{Error, Result};
use crate::operator::{CVector, DensityMatrix, HermitianOperator, PovmElement, PureState, Unitary};
use crate::random::{
    derive_seed, haar_state, haar_unitary, haar_unitary_with, near_identity_unitary, random_effect,
    rng_from_seed,
};
use crate::spectral::triangular_state;

/// Largest `n` accepted by [`scramble_search`].
pub const MAX_N: usize = 10;

/// `−log2 λ_max(ρ)`.
pub fn min_entropy(rho: &DensityMatrix) -> f64 {
    let top = rho.eigh().values.first().copied().unwrap_or(1.0);
    -top.log2()
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `⟨ψ|UρU†|ψ⟩` computed as `⟨φ|ρ|φ⟩` with `φ = U†ψ`.
fn conjugated_expectation(u: &Unitary, psi: &CVector, rho: &HermitianOperator) -> f64 {
    let phi = u.matrix().adjoint() * psi;
    rho.expectation(&phi)
}

/// `|⟨ψ|UρU†|ψ⟩ − 1/d|`.
pub fn d_psi(u: &Unitary, psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), u.dim())?;
    check_dims(rho.dim(), psi.dim())?;
    let d = rho.dim() as f64;
    Ok((conjugated_expectation(u, psi.amplitudes(), rho) - 1.0 / d).abs())
}

/// An effect split into eigenpairs, reused across many unitaries.
#[derive(Debug, Clone)]
pub struct SpectralEffect {
    weights: Vec<f64>,
    vectors: Vec<CVector>,
    trace: f64,
}

impl SpectralEffect {
    pub fn new(e: &HermitianOperator) -> Self {
        let eig = e.eigh();
        let mut weights = Vec::new();
        let mut vectors = Vec::new();
        for (i, &w) in eig.values.iter().enumerate() {
            if w > 0.0 {
                weights.push(w);
                vectors.push(eig.vector(i));
            }
        }
        Self {
            trace: e.trace(),
            weights,
            vectors,
        }
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// `Σ_j p_j |⟨ψ_j|UρU†|ψ_j⟩ − 1/d|`.
    pub fn deviation(&self, u: &Unitary, rho: &HermitianOperator) -> f64 {
        let d = rho.dim() as f64;
        self.weights
            .iter()
            .zip(&self.vectors)
            .map(|(p, v)| p * (conjugated_expectation(u, v, rho) - 1.0 / d).abs())
            .sum()
    }
}

/// `D_E(U) = Σ_j p_j d_psi(U, ψ_j, ρ)` over the eigendecomposition of `E`.
pub fn d_effect(u: &Unitary, e: &PovmElement, rho: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), u.dim())?;
    check_dims(rho.dim(), e.dim())?;
    Ok(SpectralEffect::new(e).deviation(u, rho))
}

/// `2^{−H_min(ρ) + 3/2}`.
pub fn lipschitz_constant(rho: &DensityMatrix) -> f64 {
    2f64.powf(-min_entropy(rho) + 1.5)
}

/// Worst observed `|D(U) − D(U′)| / (L ‖U − U′‖_2)` over random triples.
/// Half the pairs are independent, half are close (`U′ = U W` with `W`
/// near the identity at random scales), where the bound is tightest.
pub fn lipschitz_audit(rho: &DensityMatrix, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let dim = rho.dim();
    let bound = lipschitz_constant(rho);
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let u = haar_unitary_with(dim, &mut rng);
        let v = if t % 2 == 0 {
            haar_unitary_with(dim, &mut rng)
        } else {
            let scale = 10f64.powf(-4.0 * rand::Rng::random::<f64>(&mut rng));
            u.compose(&near_identity_unitary(dim, scale, &mut rng))
        };
        let psi = haar_state(dim, &mut rng);
        let distance = u.distance(&v);
        if distance == 0.0 {
            continue;
        }
        let change = (d_psi(&u, &psi, rho)? - d_psi(&v, &psi, rho)?).abs();
        worst = worst.max(change / (bound * distance));
    }
    Ok(worst)
}

/// `2^{−log2 d − H_min(ρ)/2} = sqrt(λ_max)/d`.
pub fn haar_average_bound(rho: &DensityMatrix) -> f64 {
    2f64.powf(-(rho.dim() as f64).log2() - 0.5 * min_entropy(rho))
}

/// Monte-Carlo mean and standard error of `d_psi` over Haar unitaries.
pub fn haar_average_mc(
    psi: &PureState,
    rho: &DensityMatrix,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    check_dims(rho.dim(), psi.dim())?;
    let mut rng = rng_from_seed(seed);
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let u = haar_unitary_with(rho.dim(), &mut rng);
            d_psi(&u, psi, rho)
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// `sqrt(768 (1 + ln N) / 2^n)`.
pub fn delta_n(n: u32, net_size: usize) -> f64 {
    let size = net_size.max(1) as f64;
    (768.0 * (1.0 + size.ln()) / 2f64.powi(n as i32)).sqrt()
}

/// `Δ(Ē) = 2^{−n} tr(Ē) (2^{(1−n)/2} + δ_n)`.
pub fn threshold(n: u32, trace: f64, delta: f64) -> f64 {
    let scale = 2f64.powi(-(n as i32));
    scale * trace * (2f64.powf((1.0 - n as f64) / 2.0) + delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScrambleReport {
    pub n: u32,
    pub dim: usize,
    /// Unitaries drawn before stopping.
    pub tries: usize,
    pub found: bool,
    /// Seed of the returned unitary (the successful one, or the best).
    pub unitary_seed: u64,
    /// `max_Ē D_Ē(U)/Δ(Ē)` for the returned unitary.
    pub max_ratio: f64,
    /// `3η + √2·2^{−n/2} + δ_n`.
    pub d_bound: f64,
    pub eta: f64,
    pub delta_n: f64,
}

impl ScrambleReport {
    pub fn unitary(&self) -> Unitary {
        haar_unitary(self.dim, self.unitary_seed)
    }
}

/// Default decoding error `η_n = 2^{−n+3}`.
pub fn default_eta(n: u32) -> f64 {
    2f64.powi(3 - n as i32)
}

fn compressed_effects(n: u32, net: &[PovmElement]) -> Result<Vec<SpectralEffect>> {
    let dim = 1usize << n;
    net.iter()
        .map(|e| {
            if e.dim() < dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            Ok(SpectralEffect::new(&e.compress(dim)?))
        })
        .collect()
}

fn worst_ratio(
    effects: &[SpectralEffect],
    u: &Unitary,
    sigma: &HermitianOperator,
    n: u32,
    delta: f64,
) -> f64 {
    effects
        .iter()
        .map(|e| {
            let limit = threshold(n, e.trace(), delta);
            let dev = e.deviation(u, sigma);
            if limit > 0.0 {
                dev / limit
            } else if dev > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Draws Haar unitaries (seeded per try) until one satisfies
/// `D_Ē(U) ≤ Δ(Ē)` for every compressed net element, with `ρ` the
/// triangular state on `2^n` levels.
pub fn scramble_search(
    n: u32,
    net: &[PovmElement],
    max_tries: usize,
    seed: u64,
    eta: Option<f64>,
) -> Result<ScrambleReport> {
    if n == 0 || n as usize > MAX_N {
        return Err(Error::TooLarge {
            what: "n",
            value: n as usize,
            cap: MAX_N,
        });
    }
    let dim = 1usize << n;
    let effects = compressed_effects(n, net)?;
    let sigma = triangular_state(dim, dim)?;
    let delta = delta_n(n, net.len());
    let eta = eta.unwrap_or_else(|| default_eta(n));
    let d_bound = 3.0 * eta + 2f64.sqrt() * 2f64.powf(-(n as f64) / 2.0) + delta;
    let mut best: Option<(f64, u64)> = None;
    let mut tries = 0;
    for t in 0..max_tries {
        tries = t + 1;
        let s = derive_seed(seed, t as u64);
        let u = haar_unitary(dim, s);
        let ratio = worst_ratio(&effects, &u, &sigma, n, delta);
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, s));
        }
        if ratio <= 1.0 {
            break;
        }
    }
    let (max_ratio, unitary_seed) = best.unwrap_or((f64::INFINITY, seed));
    Ok(ScrambleReport {
        n,
        dim,
        tries,
        found: max_ratio <= 1.0,
        unitary_seed,
        max_ratio,
        d_bound,
        eta,
        delta_n: delta,
    })
}

/// Fraction of `tries` independent Haar unitaries meeting every threshold.
pub fn scramble_success_rate(n: u32, net: &[PovmElement], tries: usize, seed: u64) -> Result<f64> {
    let dim = 1usize << n;
    let effects = compressed_effects(n, net)?;
    let sigma = triangular_state(dim, dim)?;
    let delta = delta_n(n, net.len());
    let hits = (0..tries)
        .filter(|&t| {
            let u = haar_unitary(dim, derive_seed(seed, t as u64));
            worst_ratio(&effects, &u, &sigma, n, delta) <= 1.0
        })
        .count();
    Ok(hits as f64 / tries.max(1) as f64)
}

/// `size` random product effects `E_A ⊗ E_B` on `2^{⌈n/2⌉} × 2^{⌊n/2⌋}` levels.
pub fn random_product_net(n: u32, size: usize, seed: u64) -> Vec<PovmElement> {
    let da = 1usize << n.div_ceil(2);
    let db = 1usize << (n / 2);
    let mut rng = rng_from_seed(seed);
    (0..size)
        .map(|_| random_effect(da, &mut rng).tensor(&random_effect(db, &mut rng)))
        .collect()
}
