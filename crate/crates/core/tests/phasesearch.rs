use std::f64::consts::PI;

use nalgebra::DVector;
use qppkit::linalg::{c, gates, identity, rng_from_seed, ComplexMatrix, StateVector};
use qppkit::phasesearch::{
    amplitude_estimation, circular_distance, classical_order, classifier_circuit, period_config,
    period_finding, phase_interval_search, update_interval, PhaseInterval, PhaseSearch, QpsConfig,
    Readout,
};
use qppkit::{Error, C64};

fn diag_phase(tau: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), C64::from_polar(1.0, tau)]))
}

fn excited() -> StateVector {
    StateVector::basis(2, 1).unwrap()
}

#[test]
fn classifier_reads_upper_and_lower_half_planes() {
    for eps in [1e-2, 1e-4] {
        let psi = excited().with_zero_ancilla();
        let up = classifier_circuit(0.3, eps, &diag_phase(PI / 2.0)).unwrap().apply(&psi).unwrap();
        assert!(1.0 - up.probability_one(0).unwrap() >= 1.0 - eps);
        let down = classifier_circuit(0.3, eps, &diag_phase(-PI / 2.0)).unwrap().apply(&psi).unwrap();
        assert!(down.probability_one(0).unwrap() >= 1.0 - eps);
    }
}

#[test]
fn interval_width_after_each_step() {
    let d = 0.3;
    for outcome in [0u8, 1] {
        let one = update_interval(PhaseInterval::full(), d, outcome);
        assert!((one.width() - (2.0 * d + PI)).abs() < 1e-12);
    }
    // Each later step halves the width and pads it by Δ.
    let mut iv = PhaseInterval::full();
    for q in 1..=6 {
        iv = update_interval(iv, d, (q % 2) as u8);
        let want = 2.0 * d + PI / 2f64.powi(q - 1);
        assert!((iv.width() - want).abs() < 1e-12, "Q = {q}: {} vs {want}", iv.width());
    }
}

#[test]
fn noiseless_interval_search_keeps_the_phase() {
    let tau = PI / 3.0;
    let out = phase_interval_search(
        &diag_phase(tau),
        &excited(),
        PhaseInterval::full(),
        0.3,
        1e-3,
        4,
        &mut Readout::MostLikely,
    )
    .unwrap();
    assert!(out.interval.contains_mod_2pi(tau), "{:?}", out.interval);
    assert!((out.interval.width() - (0.6 + PI / 8.0)).abs() < 1e-12);
    assert_eq!(out.queries.controlled_u_applications % 4, 0);
}

#[test]
fn sampled_interval_search_contains_phase_often() {
    let (tau, eps, q, runs) = (PI / 3.0, 0.05, 4, 200);
    let mut rng = rng_from_seed(31);
    let mut hits = 0;
    for _ in 0..runs {
        let out = phase_interval_search(
            &diag_phase(tau),
            &excited(),
            PhaseInterval::full(),
            0.3,
            eps,
            q,
            &mut Readout::Sample(&mut rng),
        )
        .unwrap();
        hits += usize::from(out.interval.contains_mod_2pi(tau));
    }
    let p = (1.0 - eps).powi(q as i32);
    let floor = p - 3.0 * (p * (1.0 - p) / runs as f64).sqrt();
    assert!(hits as f64 / runs as f64 >= floor, "{hits}/{runs} below {floor}");
}

#[test]
fn identity_estimates_zero() {
    let delta = 1e-3;
    let search = PhaseSearch::new(QpsConfig::with_defaults(0.05, delta).unwrap()).unwrap();
    assert_eq!(search.ancilla_qubits(), 1);
    for seed in 0..5 {
        let chi = StateVector::basis(4, 2).unwrap();
        let out = search.run(&identity(4), &chi, &mut rng_from_seed(seed)).unwrap();
        assert!(circular_distance(out.estimate, 0.0) <= delta);
    }
}

#[test]
fn superposition_collapses_onto_an_eigenvector() {
    let (tau, delta) = (PI / 3.0, 1e-3);
    let search = PhaseSearch::new(QpsConfig::with_defaults(0.05, delta).unwrap()).unwrap();
    let chi = StateVector::normalized(DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
    let mut seen = [false; 2];
    for seed in 0..20 {
        let out = search.run(&diag_phase(tau), &chi, &mut rng_from_seed(seed)).unwrap();
        let k = if circular_distance(out.estimate, 0.0) <= delta {
            0
        } else {
            assert!(circular_distance(out.estimate, tau) <= delta, "estimate {}", out.estimate);
            1
        };
        seen[k] = true;
        let fidelity = out.state.amplitudes()[k].norm_sqr();
        assert!(fidelity >= 0.9, "fidelity {fidelity}");
    }
    assert!(seen[0] && seen[1]);
}

#[test]
fn orders_of_small_residues() {
    let cases = [(7u64, 15u64, 4u64), (4, 5, 2), (1, 9, 1), (2, 21, 6)];
    for (x, n, r) in cases {
        assert_eq!(classical_order(x, n), Some(r));
        let out = period_finding(x, n, period_config(n, 0.1).unwrap(), &mut rng_from_seed(x + n)).unwrap();
        assert_eq!(out.order, Some(r), "x = {x}, N = {n}");
    }
}

#[test]
fn period_rejects_shared_factors() {
    let err = period_finding(6, 15, period_config(15, 0.1).unwrap(), &mut rng_from_seed(0)).unwrap_err();
    assert!(matches!(err, Error::Contract(_)), "{err:?}");
}

#[test]
fn amplitude_of_known_preparations() {
    let delta = 1e-3;
    let cfg = QpsConfig::with_defaults(0.05, delta).unwrap();
    let none = amplitude_estimation(&identity(2), cfg, &mut rng_from_seed(2)).unwrap();
    assert!(none.amplitude <= delta, "{}", none.amplitude);
    let half = amplitude_estimation(&gates::hadamard(), cfg, &mut rng_from_seed(3)).unwrap();
    assert!((half.amplitude - 0.5f64.sqrt()).abs() <= 2.0 * delta, "{}", half.amplitude);
}
