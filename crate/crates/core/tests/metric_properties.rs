use probrep_core::metrics::{
    d_m, damped_family_demo, m_norm, qubit_basis_grid, random_state_pair, statistical_distance,
    trace_distance, FamilyKind, MeasurementFamily, SupStrategy,
};
use probrep_core::random::{random_density_any_rank, random_hermitian, random_povm, rng_from_seed};
use probrep_core::{born_rule, trace_norm};
use proptest::prelude::*;

fn sampled(kind: FamilyKind, seed: u64) -> MeasurementFamily {
    MeasurementFamily::new(
        kind,
        SupStrategy::Sample {
            count: 8,
            seed,
            refine_steps: 0,
        },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn data_processing(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let dim = da * db;
        let (rho, sigma) = random_state_pair(dim, &mut rng);
        let delta = trace_distance(&rho, &sigma).unwrap();
        for family in [
            sampled(FamilyKind::ProductRank1Bases { dim_a: da, dim_b: db }, seed),
            sampled(FamilyKind::AllRank1Bases { dim }, seed),
            MeasurementFamily::explicit(vec![random_povm(dim, 3, &mut rng)]).unwrap(),
        ] {
            prop_assert!(d_m(&rho, &sigma, &family).unwrap().value <= delta + 1e-9);
        }
    }

    #[test]
    fn m_norm_below_trace_norm(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = random_hermitian(dim, &mut rng);
        for family in [
            sampled(FamilyKind::AllRank1Bases { dim }, seed),
            sampled(FamilyKind::Damped { dim }, seed),
            MeasurementFamily::new(FamilyKind::Damped { dim }, SupStrategy::AnalyticWitness).unwrap(),
            MeasurementFamily::new(FamilyKind::AllRank1Bases { dim }, SupStrategy::AnalyticWitness).unwrap(),
        ] {
            prop_assert!(m_norm(&a, &family).unwrap().value <= trace_norm(&a) + 1e-9);
        }
    }

    #[test]
    fn distances_are_metrics(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let r: Vec<_> = (0..3).map(|_| random_density_any_rank(dim, &mut rng)).collect();
        let t = |i: usize, j: usize| trace_distance(&r[i], &r[j]).unwrap();
        prop_assert!((t(0, 1) - t(1, 0)).abs() < 1e-9);
        prop_assert!(t(0, 2) <= t(0, 1) + t(1, 2) + 1e-9);
        let m = random_povm(dim, 4, &mut rng);
        let p: Vec<_> = r.iter().map(|x| born_rule(&m, x).unwrap()).collect();
        let s = |i: usize, j: usize| statistical_distance(&p[i], &p[j]).unwrap();
        prop_assert!((s(0, 1) - s(1, 0)).abs() < 1e-9);
        prop_assert!(s(0, 2) <= s(0, 1) + s(1, 2) + 1e-9);
    }
}

#[test]
fn qubit_grid_approaches_trace_distance() {
    let family = MeasurementFamily::explicit(qubit_basis_grid(1000)).unwrap();
    let mut rng = rng_from_seed(21);
    for _ in 0..50 {
        let (rho, sigma) = random_state_pair(2, &mut rng);
        let delta = trace_distance(&rho, &sigma).unwrap();
        let d = d_m(&rho, &sigma, &family).unwrap().value;
        assert!(d <= delta + 1e-9);
        assert!(d >= 0.98 * delta, "{d} vs {delta}");
    }
}

#[test]
fn damped_rows_match_formula() {
    let rows = damped_family_demo(6).unwrap();
    assert_eq!(rows[0].d_damped, 0.0);
    assert_eq!(rows[0].delta, 0.0);
    for row in &rows[1..] {
        let expected = (-2.0 * row.n as f64).exp();
        assert!((row.d_damped - expected).abs() <= 1e-12 * expected.max(1e-300) + 1e-15);
        assert!((row.delta - 1.0).abs() < 1e-12);
    }
}
