use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use proptest::prelude::*;
use qppkit::blockenc::{
    density_block_encoding, encode_hermitian, expected_flagged_phases, flagged_eigenphases,
    phase_multiset_distance, purified_oracle, qubitize,
};
use qppkit::linalg::{
    c, eig_hermitian, gates, identity, max_abs_diff, partial_trace_tail, rng_from_seed,
    spectral_norm, unitary_residual, ComplexMatrix,
};
use qppkit::random::{random_density, random_hermitian};
use rand::Rng;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn reduced(u: &ComplexMatrix) -> ComplexMatrix {
    let psi = u.column(0).into_owned();
    let n = (u.nrows() as f64).sqrt().round() as usize;
    partial_trace_tail(&(&psi * psi.adjoint()), n.trailing_zeros() as usize)
}

#[test]
fn pauli_z_and_zero_encodings() {
    let be = encode_hermitian(&gates::pauli_z(), 1.0).unwrap();
    assert!(max_abs_diff(&be.block(), &gates::pauli_z()) < 1e-12);
    let zero = encode_hermitian(&ComplexMatrix::zeros(2, 2), 1.0).unwrap();
    assert!(max_abs_diff(&zero.block(), &ComplexMatrix::zeros(2, 2)) < 1e-12);
    // With a zero block the dilation swaps the ancilla, like X ⊗ I.
    let u = zero.unitary();
    assert!(max_abs_diff(&u.view((0, 2), (2, 2)).into_owned(), &identity(2)) < 1e-12);
}

#[test]
fn encoding_rejects_small_scale() {
    let h = gates::pauli_z().scale(2.0);
    assert!(matches!(encode_hermitian(&h, 1.0), Err(qppkit::Error::Contract(_))));
}

#[test]
fn qubitized_examples() {
    let id = qubitize(&encode_hermitian(&identity(2), 1.0).unwrap()).unwrap();
    assert!(flagged_eigenphases(&id).unwrap().iter().all(|t| t.abs() < 1e-7));
    let z = qubitize(&encode_hermitian(&gates::pauli_z(), 1.0).unwrap()).unwrap();
    let d = phase_multiset_distance(&flagged_eigenphases(&z).unwrap(), &expected_flagged_phases(&[-1.0, 1.0]));
    assert!(d < 1e-7);
}

#[test]
fn purification_examples() {
    let mut pure = ComplexMatrix::zeros(2, 2);
    pure[(0, 0)] = c(1.0, 0.0);
    let u = purified_oracle(&pure).unwrap();
    assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
    let half = identity(2).scale(0.5);
    let u = purified_oracle(&half).unwrap();
    // Maximally entangled: the 2x2 amplitude matrix M satisfies M M† = I/2.
    let psi = u.column(0);
    let m = ComplexMatrix::from_row_slice(2, 2, &[psi[0], psi[1], psi[2], psi[3]]);
    assert!(max_abs_diff(&(&m * m.adjoint()), &half) < 1e-12);
    assert!(unitary_residual(&u) < 1e-10);
}

#[test]
fn density_encoding_examples() {
    let mut pure = ComplexMatrix::zeros(2, 2);
    pure[(0, 0)] = c(1.0, 0.0);
    let q = density_block_encoding(&purified_oracle(&pure).unwrap()).unwrap();
    assert!(max_abs_diff(&q.block(), &pure) < 1e-8);
    let got = sorted(flagged_eigenphases(&q).unwrap());
    // λ = 1 spans a one-dimensional flagged subspace, so it adds a single phase 0.
    let want = sorted(vec![0.0, FRAC_PI_2, -FRAC_PI_2]);
    assert!(phase_multiset_distance(&got, &want) < 1e-7, "{got:?}");
    assert!(phase_multiset_distance(&got, &expected_flagged_phases(&[1.0, 0.0])) < 1e-7);

    let half = identity(2).scale(0.5);
    let q = density_block_encoding(&purified_oracle(&half).unwrap()).unwrap();
    let want = vec![FRAC_PI_3, -FRAC_PI_3, FRAC_PI_3, -FRAC_PI_3];
    assert!(phase_multiset_distance(&flagged_eigenphases(&q).unwrap(), &want) < 1e-7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hermitian_block_round_trip(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian(1 << n, rng.gen_range(0.1..3.0), &mut rng);
        let lambda = spectral_norm(&h);
        let be = encode_hermitian(&h, lambda).unwrap();
        prop_assert!(max_abs_diff(&be.block(), &h.scale(1.0 / lambda)) <= 1e-9);
        prop_assert!(unitary_residual(be.unitary()) <= 1e-9);
    }

    #[test]
    fn qubitized_spectral_law(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian(1 << n, 1.0, &mut rng);
        let q = qubitize(&encode_hermitian(&h, rng.gen_range(1.0..2.0)).unwrap()).unwrap();
        let eigs: Vec<f64> = eig_hermitian(&q.block()).unwrap().eigenvalues.iter().map(|z| z.re).collect();
        let d = phase_multiset_distance(&flagged_eigenphases(&q).unwrap(), &expected_flagged_phases(&eigs));
        prop_assert!(d <= 1e-7);
    }

    #[test]
    fn walk_subspaces_are_invariant(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian(4, 1.0, &mut rng);
        let q = qubitize(&encode_hermitian(&h, 1.2).unwrap()).unwrap();
        let spec = eig_hermitian(&h).unwrap();
        let u = q.unitary();
        for j in 0..4 {
            let a = q.lift(&spec.eigenvector(j));
            let b = u * &a;
            // Û²a must stay in span{a, Ûa}.
            let w = u * &b;
            let basis = ComplexMatrix::from_columns(&[a.clone(), b.clone()]);
            let coef = basis.clone().svd(true, true).solve(&w, 1e-12).unwrap();
            prop_assert!((basis * coef - w).norm() <= 1e-8);
            // The pre-reflector squares to the identity on flagged lifts.
            let t = q.pre_reflector();
            prop_assert!((t * (t * &a) - &a).norm() <= 1e-8);
        }
    }

    #[test]
    fn density_encoding_reproduces_state(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = rng_from_seed(seed);
        let dim = 1 << n;
        let rho = random_density(dim, rng.gen_range(1..=dim), 0.0, &mut rng);
        let u = purified_oracle(&rho).unwrap();
        prop_assert!(max_abs_diff(&reduced(&u), &rho) <= 1e-9);
        let q = density_block_encoding(&u).unwrap();
        prop_assert!(max_abs_diff(&q.block(), &rho) <= 1e-8);
        let p: Vec<f64> = eig_hermitian(&rho).unwrap().eigenvalues.iter().map(|z| z.re).collect();
        let d = phase_multiset_distance(&flagged_eigenphases(&q).unwrap(), &expected_flagged_phases(&p));
        prop_assert!(d <= 1e-7);
    }
}
