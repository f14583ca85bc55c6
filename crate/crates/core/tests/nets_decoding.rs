use probrep_core::nets::{
    build_net, decode_measurement, entropy_budget, product_snap_element,
    pure_norm_conversion_check, ray_distance, snap_element, BudgetKind, StateNet,
};
use probrep_core::random::{
    haar_state, random_density_any_rank, random_effect, random_povm, rng_from_seed,
};
use probrep_core::trace_norm;
use proptest::prelude::*;

fn audit_snaps(net: &StateNet, seed: u64) {
    let mut rng = rng_from_seed(seed);
    for _ in 0..1000 {
        let e = random_effect(net.dim(), &mut rng);
        let s = snap_element(&e, net).unwrap();
        let actual = trace_norm(&(&s.approx - e.operator()));
        assert!(
            actual <= s.error_bound + 1e-9,
            "{actual} > {}",
            s.error_bound
        );
    }
}

#[test]
fn nets_cover_and_snaps_stay_in_bounds() {
    for (dim, eps) in [(2usize, 0.5), (2, 0.25), (3, 0.5), (4, 0.5)] {
        let net = build_net(dim, eps, 17).unwrap();
        assert!(net.certificate().unwrap().passed());
        let independent = net.certify(100_000, 1234);
        assert!(independent.passed(), "dim {dim} eps {eps}: {independent:?}");
        assert!(independent.worst_distance <= eps);
        audit_snaps(&net, dim as u64);
    }
}

#[test]
fn product_snaps_stay_in_bounds() {
    let a = build_net(2, 0.5, 1).unwrap();
    let b = build_net(2, 0.25, 2).unwrap();
    let mut rng = rng_from_seed(6);
    for _ in 0..1000 {
        let ea = random_effect(2, &mut rng);
        let eb = random_effect(2, &mut rng);
        let (approx, bound) = product_snap_element(&ea, &eb, &a, &b).unwrap();
        let exact = ea.tensor(&eb);
        assert!(trace_norm(&(&approx - exact.operator())) <= bound + 1e-9);
    }
}

#[test]
fn decoding_errors_within_bounds_and_shrink() {
    let nets: Vec<StateNet> = [0.5, 0.25, 0.1]
        .iter()
        .map(|&eps| build_net(2, eps, 3).unwrap())
        .collect();
    let mut rng = rng_from_seed(10);
    let cases: Vec<_> = (0..1000)
        .map(|_| {
            (
                random_povm(2, 3, &mut rng),
                random_density_any_rank(2, &mut rng),
            )
        })
        .collect();
    let mut worst = Vec::new();
    for net in &nets {
        let mut w: f64 = 0.0;
        for (m, rho) in &cases {
            let r = decode_measurement(m, net, rho).unwrap();
            for (e, b) in r.errors.iter().zip(&r.bounds) {
                assert!(*e <= b + 1e-9);
            }
            assert!(r.operation.coefficients.values().all(|c| *c >= 0.0));
            w = w.max(r.linf_error);
        }
        worst.push(w);
    }
    assert!(worst[0] >= worst[1] && worst[1] >= worst[2], "{worst:?}");

    let net4 = build_net(4, 0.5, 4).unwrap();
    for _ in 0..1000 {
        let m = random_povm(4, 3, &mut rng);
        let rho = random_density_any_rank(4, &mut rng);
        let r = decode_measurement(&m, &net4, &rho).unwrap();
        for (e, b) in r.errors.iter().zip(&r.bounds) {
            assert!(*e <= b + 1e-9);
        }
    }
}

#[test]
fn text_format_round_trip() {
    let net = build_net(3, 0.5, 2).unwrap();
    let text = net.to_text();
    assert!(text.starts_with("3 0.5 2\n"));
    let back = StateNet::from_text(&text).unwrap();
    assert_eq!(back.points(), net.points());
    assert!(back.certify(10_000, 5).passed());
}

#[test]
fn entropy_budget_ratio() {
    let ratio = |n| entropy_budget(BudgetKind::Product, n) / entropy_budget(BudgetKind::All, n);
    assert!((ratio(20) - 1.450e-3).abs() < 1e-6);
    assert!(ratio(21) > 1e-3);
    assert!(ratio(22) < 1e-3);
    for n in 4..60 {
        assert!(ratio(n + 1) < ratio(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_conversion(seed in any::<u64>(), dim in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let phi = haar_state(dim, &mut rng);
        let psi = haar_state(dim, &mut rng);
        let (lhs, rhs) = pure_norm_conversion_check(&phi, &psi).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
        // The bound also holds for the best-aligned representative.
        prop_assert!(lhs <= 2.0 * ray_distance(&phi, &psi) + 1e-9);
    }
}
