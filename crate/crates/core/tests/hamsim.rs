use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use qppkit::hamsim::{
    asymptotic_queries, eigenvalues_from_phases, exact_evolution, extract_spectrum, simulate,
    SimRequest,
};
use qppkit::linalg::{c, gates, identity, kron, rng_from_seed, spectral_norm, ComplexMatrix};
use qppkit::phasesearch::QpsConfig;
use qppkit::random::random_hermitian;
use qppkit::Error;

#[test]
fn pauli_z_quarter_turn() {
    let delta = 1e-3;
    let out = simulate(&SimRequest::new(gates::pauli_z(), FRAC_PI_2, delta)).unwrap();
    let mut want = ComplexMatrix::zeros(2, 2);
    want[(0, 0)] = c(0.0, -1.0);
    want[(1, 1)] = c(0.0, 1.0);
    assert!(spectral_norm(&(&out.block - want)) <= delta);
    assert_eq!(out.queries, 2 * out.truncation_order);
}

#[test]
fn evolutions_compose() {
    let delta = 1e-3;
    let h = random_hermitian(4, 1.0, &mut rng_from_seed(17));
    let run = |t: f64| simulate(&SimRequest::new(h.clone(), t, delta)).unwrap();
    for (t1, t2) in [(0.5, 1.5), (1.0, 2.0), (2.5, 0.7)] {
        let (a, b, ab) = (run(t1), run(t2), run(t1 + t2));
        let gap = spectral_norm(&(&a.block * &b.block - &ab.block));
        assert!(gap <= 2.0 * delta + delta, "t = {t1} + {t2}: {gap}");
        assert!(gap <= a.error_vs_exact + b.error_vs_exact + ab.error_vs_exact + 1e-12);
    }
}

#[test]
fn queries_grow_linearly_with_time() {
    let h = gates::pauli_x();
    let ratios: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&t| {
            let out = simulate(&SimRequest::new(h.clone(), t, 1e-3)).unwrap();
            out.queries as f64 / asymptotic_queries(t, 1e-3)
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    for r in &ratios {
        assert!((r / mean - 1.0).abs() <= 0.3, "{ratios:?}");
    }
}

#[test]
fn larger_lambda_costs_more_queries() {
    let h = gates::pauli_z();
    let tight = simulate(&SimRequest::new(h.clone(), 3.0, 1e-3)).unwrap();
    let loose = simulate(&SimRequest::new(h, 3.0, 1e-3).with_lambda(4.0)).unwrap();
    assert!(loose.queries > tight.queries);
    assert!(loose.error_vs_exact <= 1e-3);
}

#[test]
fn oversized_systems_are_refused() {
    let h = random_hermitian(16, 1.0, &mut rng_from_seed(1));
    let err = simulate(&SimRequest::new(h, 1.0, 1e-3)).unwrap_err();
    assert!(matches!(err, Error::Resource(_)), "{err:?}");
}

#[test]
fn lambda_below_norm_is_a_contract_error() {
    let h = gates::pauli_z().scale(2.0);
    let err = simulate(&SimRequest::new(h, 1.0, 1e-3).with_lambda(1.0)).unwrap_err();
    assert!(matches!(err, Error::Contract(_)), "{err:?}");
}

#[test]
fn spectrum_of_a_product_hamiltonian() {
    let h = kron(&gates::pauli_z(), &identity(2)).scale(0.5) + kron(&identity(2), &gates::pauli_x()).scale(0.25);
    let cfg = QpsConfig::with_defaults(0.05, 1e-3).unwrap();
    let est = extract_spectrum(&h, 1.0, cfg, &mut rng_from_seed(4)).unwrap();
    let mut got: Vec<f64> = est.iter().map(|e| e.eigenvalue).collect();
    got.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip([-0.75, -0.25, 0.25, 0.75]) {
        assert!((a - b).abs() <= 1e-3, "{got:?}");
    }
    let phases: Vec<f64> = est.iter().map(|e| e.phase).collect();
    let back = eigenvalues_from_phases(1.0, &phases);
    assert!(est.iter().zip(&back).all(|(e, v)| (e.eigenvalue - v).abs() < 1e-15));
    assert!(est.iter().all(|e| e.flag_probability > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn block_is_close_to_exact_and_nearly_unitary(
        seed in any::<u64>(),
        qubits in 1usize..=2,
        t in -4.0f64..4.0,
        slack in 1.0f64..2.0,
    ) {
        let delta = 1e-3;
        let h = random_hermitian(1 << qubits, 1.0, &mut rng_from_seed(seed));
        let lambda = spectral_norm(&h) * slack;
        let out = simulate(&SimRequest::new(h.clone(), t, delta).with_lambda(lambda)).unwrap();
        let exact = exact_evolution(&h, t).unwrap();
        prop_assert!(spectral_norm(&(&out.block - exact)) <= delta);
        prop_assert!(out.unitarity_residual <= 2.0 * delta);
        prop_assert!(out.success_probability >= 1.0 - 2.0 * delta);
    }
}
