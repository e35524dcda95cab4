use proptest::prelude::*;
use qppkit::approx::{jacobi_anger_truncation, square_wave};
use qppkit::laurent::{complement, verification_grid};
use qppkit::linalg::{c, gates, max_abs_diff, rng_from_seed, unitary_residual};
use qppkit::qsp::{
    angles_for_expectation, angles_for_projection, expectation_error, find_angles, projection_error,
    qsp_unitary, round_trip_error, AngleSet,
};
use qppkit::{LaurentPoly, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn bounded(l: usize, rng: &mut ChaCha8Rng) -> LaurentPoly {
    let terms: Vec<(i64, C64)> = (0..=l)
        .map(|k| (-(l as i64) + 2 * k as i64, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let p = LaurentPoly::from_terms(&terms).unwrap();
    let m = p.grid_max_abs(20 * (l + 1) + 1);
    p.scale(c(0.95 / m, 0.0))
}

fn random_angles(l: usize, rng: &mut ChaCha8Rng) -> AngleSet {
    let mut g = || rng.gen_range(-3.0..3.0);
    let omega = g();
    let thetas = (0..=l).map(|_| g()).collect();
    let phis = (0..=l).map(|_| g()).collect();
    AngleSet::new(omega, thetas, phis).unwrap()
}

/// `W(x)` multiplied out gate by gate with dense matrices.
fn gate_product(a: &AngleSet, x: f64) -> qppkit::ComplexMatrix {
    let mut w = gates::rz(a.omega) * gates::ry(a.thetas[0]) * gates::rz(a.phis[0]);
    for l in 1..=a.layers() {
        w = w * gates::rz(x) * gates::ry(a.thetas[l]) * gates::rz(a.phis[l]);
    }
    w
}

#[test]
fn trivial_sequences() {
    let zero = AngleSet::new(0.0, vec![0.0], vec![0.0]).unwrap();
    assert!(max_abs_diff(&qsp_unitary(&zero, 0.7), &qppkit::linalg::identity(2)) < 1e-15);
    let one = AngleSet::new(0.0, vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
    for x in [-2.0, 0.3, 1.9] {
        assert!(max_abs_diff(&qsp_unitary(&one, x), &gates::rz(x)) < 1e-15);
    }
}

#[test]
fn matches_gate_product() {
    let mut rng = rng_from_seed(7);
    let a = random_angles(7, &mut rng);
    for x in verification_grid(7) {
        assert!(max_abs_diff(&qsp_unitary(&a, x), &gate_product(&a, x)) < 1e-12);
    }
}

#[test]
fn single_exponential() {
    let p = LaurentPoly::from_terms(&[(1, c(1.0, 0.0))]).unwrap();
    let q = LaurentPoly::zero(1);
    let a = find_angles(&p, &q).unwrap();
    assert_eq!(a.layers(), 1);
    for x in verification_grid(1) {
        assert!((qsp_unitary(&a, x)[(0, 0)] - C64::from_polar(1.0, 0.5 * x)).norm() < 1e-10);
    }
}

#[test]
fn cosine_expectation_uses_hadamard_like_rotations() {
    let f = LaurentPoly::from_terms(&[(-2, c(0.5, 0.0)), (2, c(0.5, 0.0))]).unwrap();
    let a = angles_for_expectation(&f).unwrap();
    assert_eq!(a.layers(), 1);
    assert!(expectation_error(&a, &f) < 1e-10);
    for l in 0..=1 {
        let g = gates::ry(a.thetas[l]) * gates::rz(a.phis[l]);
        assert!(g.iter().all(|v| (v.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10));
    }
}

#[test]
fn zero_expectation() {
    let f = LaurentPoly::constant(c(0.0, 0.0));
    let a = angles_for_expectation(&f).unwrap();
    assert!(expectation_error(&a, &f) < 1e-12);
}

#[test]
fn projection_targets() {
    let one = LaurentPoly::constant(c(1.0, 0.0));
    assert!(projection_error(&angles_for_projection(&one).unwrap(), &one) < 1e-10);
    let e = LaurentPoly::from_terms(&[(2, c(1.0, 0.0))]).unwrap();
    assert!(projection_error(&angles_for_projection(&e).unwrap(), &e) < 1e-10);
    // e^{i cos x} truncated at order 12, scaled into the unit disc.
    let ja = jacobi_anger_truncation(-1.0, 12);
    let ja = ja.scale(c(0.999 / ja.grid_max_abs(2001).max(1.0), 0.0));
    assert!(projection_error(&angles_for_projection(&ja).unwrap(), &ja) <= 1e-6);
}

#[test]
fn square_wave_expectation() {
    let f = square_wave(0.5, 0.1).unwrap();
    let a = angles_for_expectation(&f).unwrap();
    assert!(expectation_error(&a, &f) <= 1e-6);
}

#[test]
fn expectation_rejects_complex_target() {
    let f = LaurentPoly::from_terms(&[(2, c(0.5, 0.0))]).unwrap();
    assert!(matches!(angles_for_expectation(&f), Err(qppkit::Error::Contract(_))));
}

#[test]
fn degree_fifty_round_trip() {
    let p = bounded(50, &mut rng_from_seed(50));
    let q = complement(&p).unwrap();
    assert!(round_trip_error(&find_angles(&p, &q).unwrap(), &p, &q) <= 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_up_to_degree_100(seed in any::<u64>(), l in 1usize..=100) {
        let p = bounded(l, &mut rng_from_seed(seed));
        let q = complement(&p).unwrap();
        let a = find_angles(&p, &q).unwrap();
        prop_assert_eq!(a.layers(), l);
        prop_assert!(round_trip_error(&a, &p, &q) <= 1e-6);
    }

    #[test]
    fn assembled_sequence_is_unitary(seed in any::<u64>(), l in 0usize..40) {
        let mut rng = rng_from_seed(seed);
        let a = random_angles(l, &mut rng);
        for x in verification_grid(l) {
            prop_assert!(unitary_residual(&qsp_unitary(&a, x)) <= 1e-10);
        }
    }
}
