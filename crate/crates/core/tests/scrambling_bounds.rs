use probrep_core::random::{haar_state, haar_unitary_with, random_density_any_rank, rng_from_seed};
use probrep_core::scrambling::{
    d_psi, delta_n, haar_average_bound, haar_average_mc, lipschitz_audit, lipschitz_constant,
    random_product_net, scramble_search, threshold,
};
use probrep_core::spectral::triangular_state;
use probrep_core::{DensityMatrix, HermitianOperator, PureState};
use proptest::prelude::*;

// D for an effect, recomputed from dense products: Σ_j p_j |tr(ψ_jψ_j† UσU†) − 1/d|.
fn dense_deviation(u: &probrep_core::Unitary, e: &HermitianOperator, sigma: &DensityMatrix) -> f64 {
    let rotated = sigma.conjugate_by(u);
    let eig = e.eigh();
    let d = sigma.dim() as f64;
    eig.values
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(k, w)| {
            let psi = PureState::normalized(eig.vector(k)).unwrap();
            let p = HermitianOperator::projector(&psi).trace_product(&rotated);
            w * (p - 1.0 / d).abs()
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn maximally_mixed_has_no_deviation(seed in any::<u64>(), dim in 1usize..=12) {
        let mut rng = rng_from_seed(seed);
        let u = haar_unitary_with(dim, &mut rng);
        let psi = haar_state(dim, &mut rng);
        prop_assert!(d_psi(&u, &psi, &DensityMatrix::maximally_mixed(dim)).unwrap() < 1e-12);
    }

    #[test]
    fn d_psi_matches_born_rule(seed in any::<u64>(), dim in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let u = haar_unitary_with(dim, &mut rng);
        let psi = haar_state(dim, &mut rng);
        let rho = random_density_any_rank(dim, &mut rng);
        let direct = (HermitianOperator::projector(&psi).trace_product(&rho.conjugate_by(&u))
            - 1.0 / dim as f64)
            .abs();
        prop_assert!((d_psi(&u, &psi, &rho).unwrap() - direct).abs() < 1e-12);
    }
}

#[test]
fn lipschitz_audit_small_dims() {
    let mut rng = rng_from_seed(3);
    for dim in [2usize, 3, 4, 8, 16] {
        let rho = random_density_any_rank(dim, &mut rng);
        assert!(lipschitz_audit(&rho, 1000, dim as u64).unwrap() <= 1.0 + 1e-9);
    }
    let pure = DensityMatrix::basis_state(2, 0);
    assert!((lipschitz_constant(&pure) - 2f64.powf(1.5)).abs() < 1e-12);
    let tri = triangular_state(4, 4).unwrap();
    assert!(lipschitz_audit(&tri, 2000, 9).unwrap() <= 1.0 + 1e-9);
}

// For pure ρ in d = 2, |⟨ψ|UρU†|ψ⟩|² is uniform on [0, 1], so E|X − ½| = ¼.
#[test]
fn qubit_haar_average_oracle() {
    let rho = DensityMatrix::basis_state(2, 0);
    let psi = PureState::basis(2, 1);
    let (mean, stderr) = haar_average_mc(&psi, &rho, 20_000, 4).unwrap();
    assert!((mean - 0.25).abs() < 4.0 * stderr, "{mean} ± {stderr}");
    assert!((haar_average_bound(&rho) - 0.5).abs() < 1e-12);
    let (m0, _) = haar_average_mc(&psi, &DensityMatrix::maximally_mixed(2), 100, 1).unwrap();
    assert!(m0 < 1e-12);
}

#[test]
fn haar_average_bound_holds() {
    let mut rng = rng_from_seed(8);
    for k in 0..10 {
        let dim = 2 + k % 7;
        let rho = random_density_any_rank(dim, &mut rng);
        let psi = haar_state(dim, &mut rng);
        let (mean, stderr) = haar_average_mc(&psi, &rho, 2000, k as u64).unwrap();
        assert!(mean <= haar_average_bound(&rho) + 3.0 * stderr);
    }
    let tri = triangular_state(8, 8).unwrap();
    let (mean, stderr) = haar_average_mc(&PureState::basis(8, 0), &tri, 10_000, 2).unwrap();
    assert!(mean <= haar_average_bound(&tri) + 3.0 * stderr);
}

#[test]
fn found_unitaries_meet_every_threshold() {
    let n = 4;
    let dim = 16;
    let net = random_product_net(n, 100, 12);
    let report = scramble_search(n, &net, 100, 5, None).unwrap();
    assert!(report.found);
    assert!(report.max_ratio <= 1.0);
    let u = report.unitary();
    let sigma = triangular_state(dim, dim).unwrap();
    let delta = delta_n(n, net.len());
    for e in &net {
        let compressed = e.compress(dim).unwrap();
        let dev = dense_deviation(&u, &compressed, &sigma);
        assert!(dev <= threshold(n, compressed.trace(), delta) + 1e-9);
    }
}

#[test]
fn tiny_search() {
    let net = random_product_net(2, 4, 1);
    let r = scramble_search(2, &net, 100, 3, None).unwrap();
    assert!(r.found && r.max_ratio <= 1.0);
    let empty = scramble_search(2, &[], 10, 3, None).unwrap();
    assert!(empty.found);
    assert_eq!(empty.max_ratio, 0.0);
    assert_eq!(empty.tries, 1);
}
