use proptest::prelude::*;
use qppkit::approx::RealPoly;
use qppkit::blockenc::{density_block_encoding, purified_oracle};
use qppkit::entropy::{
    newton_girard, power_traces, relative_entropy, renyi, trace_rho_f_sigma, von_neumann,
    EntropyEstimator, EntropyKind, EntropyRequest, Mode,
};
use qppkit::linalg::{c, hermitian_function, identity, rng_from_seed, ComplexMatrix};
use qppkit::random::{density_with_spectrum, random_density};
use rand::Rng;

fn diag(p: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(p.len(), p.len());
    for (i, &v) in p.iter().enumerate() {
        m[(i, i)] = c(v, 0.0);
    }
    m
}

fn spectrum(rho: &ComplexMatrix) -> Vec<f64> {
    qppkit::linalg::eig_hermitian(rho).unwrap().eigenvalues.iter().map(|z| z.re.max(0.0)).collect()
}

fn von_neumann_exact(rho: &ComplexMatrix) -> f64 {
    spectrum(rho).iter().filter(|&&p| p > 1e-14).map(|p| -p * p.ln()).sum()
}

fn bounded_poly(degree: usize, seed: u64) -> RealPoly {
    let mut rng = rng_from_seed(seed);
    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p = RealPoly::chebyshev(coeffs);
    let m = p.max_abs_on(-1.0, 1.0);
    p.scale(0.9 / m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_circuit_matches_spectral_trace(degree in 0usize..=20, seed in any::<u64>(), qubits in 1usize..=2) {
        let f = bounded_poly(degree, seed);
        let mut rng = rng_from_seed(seed ^ 0x5eed);
        let dim = 1 << qubits;
        let rho = random_density(dim, rng.gen_range(1..=dim), 0.0, &mut rng);
        let sigma = random_density(dim, rng.gen_range(1..=dim), 0.0, &mut rng);
        let enc = density_block_encoding(&purified_oracle(&sigma).unwrap()).unwrap();
        let got = trace_rho_f_sigma(&purified_oracle(&rho).unwrap(), &enc, &f, Mode::Exact, 0).unwrap();
        let fs = hermitian_function(&sigma, |x| c(f.evaluate(x), 0.0)).unwrap();
        let want = (&rho * fs).trace().re;
        prop_assert!((got.value - want).abs() < 1e-7, "{} vs {}", got.value, want);
        prop_assert_eq!(got.measured_qubits, 1);
    }

    #[test]
    fn newton_girard_recovers_low_rank_spectra(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let mut p: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p.resize(6, 0.0);
        let rho = density_with_spectrum(&p, &mut rng);
        let got = newton_girard(&power_traces(&rho, rank).unwrap()).unwrap();
        let mut want = p.clone();
        want.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", got, want);
        }
    }
}

#[test]
fn sampled_trace_concentrates() {
    let mut rng = rng_from_seed(12);
    let rho = random_density(2, 2, 0.0, &mut rng);
    let sigma = random_density(2, 2, 0.0, &mut rng);
    let f = bounded_poly(6, 4);
    let u_rho = purified_oracle(&rho).unwrap();
    let enc = density_block_encoding(&purified_oracle(&sigma).unwrap()).unwrap();
    let exact = trace_rho_f_sigma(&u_rho, &enc, &f, Mode::Exact, 0).unwrap();
    let shots = 40_000;
    for seed in 0..5 {
        let s = trace_rho_f_sigma(&u_rho, &enc, &f, Mode::Shots(shots), seed).unwrap();
        assert_eq!(s.shots, shots);
        assert!((s.value - exact.value).abs() <= 5.0 / (shots as f64).sqrt());
        assert!(s.half_width > 0.0);
    }
    assert_eq!(exact.half_width, 0.0);
}

#[test]
fn maximally_mixed_states() {
    for n in 1..=3usize {
        let dim = 1 << n;
        let rho = identity(dim).scale(1.0 / dim as f64);
        let req = EntropyRequest::new(EntropyKind::VonNeumann, 0.05).with_gamma(0.1);
        let s = von_neumann(&rho, &req).unwrap();
        let want = n as f64 * 2f64.ln();
        assert!((s.estimate - want).abs() <= s.half_width, "n = {n}: {} vs {want}", s.estimate);
        assert!(s.warnings.is_empty());
    }
}

#[test]
fn integer_and_fractional_collision_entropy_agree() {
    let mut rng = rng_from_seed(8);
    let rho = random_density(4, 4, 0.1, &mut rng);
    let exact = -power_traces(&rho, 2).unwrap()[1].ln();
    let int = renyi(&rho, &EntropyRequest::new(EntropyKind::Renyi { alpha: 2.0 }, 1e-2)).unwrap();
    let frac_req = EntropyRequest::new(EntropyKind::Renyi { alpha: 2.0 + 1e-9 }, 1e-2).with_gamma(0.1);
    let frac = renyi(&rho, &frac_req).unwrap();
    assert!((int.estimate - exact).abs() < 1e-6);
    assert!((frac.estimate - exact).abs() <= frac.half_width);
    assert!((int.estimate - frac.estimate).abs() <= 1e-2);
}

#[test]
fn relative_entropy_of_commuting_states() {
    let (p, q): ([f64; 2], [f64; 2]) = ([0.7, 0.3], [0.4, 0.6]);
    let want: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
    let req = EntropyRequest::new(EntropyKind::Relative, 1e-2).with_gamma(0.2);
    let d = relative_entropy(&diag(&p), &diag(&q), &req).unwrap();
    assert!((d.estimate - want).abs() <= d.half_width, "{} vs {want}", d.estimate);
    assert_eq!(d.expectations.len(), 2);
}

#[test]
fn relative_entropy_outside_support_is_infinite() {
    let req = EntropyRequest::new(EntropyKind::Relative, 1e-2).with_gamma(0.2);
    let d = relative_entropy(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0]), &req).unwrap();
    assert!(d.estimate.is_infinite());
    assert!(!d.warnings.is_empty());
}

#[test]
fn floor_violation_is_reported() {
    let req = EntropyRequest::new(EntropyKind::VonNeumann, 1e-2).with_gamma(0.2);
    let s = von_neumann(&diag(&[0.95, 0.05]), &req).unwrap();
    assert!(s.warnings.iter().any(|w| w.contains("below the floor")));
}

#[test]
fn rank_mode_on_pure_and_mixed_states() {
    let est = EntropyEstimator::new(EntropyKind::VonNeumann, None, Some(1), 0.3).unwrap();
    let pure = diag(&[1.0, 0.0]);
    let s = est.estimate(&pure, None, Mode::Exact, 0).unwrap();
    assert!(s.estimate.abs() <= s.half_width, "{}", s.estimate);
    let mut rng = rng_from_seed(2);
    let est = EntropyEstimator::new(EntropyKind::VonNeumann, None, Some(2), 0.3).unwrap();
    let rho = random_density(2, 2, 0.2, &mut rng);
    let s = est.estimate(&rho, None, Mode::Exact, 0).unwrap();
    assert!((s.estimate - von_neumann_exact(&rho)).abs() <= s.half_width);
}

#[test]
fn requests_need_a_floor() {
    assert!(EntropyEstimator::new(EntropyKind::VonNeumann, None, None, 0.1).is_err());
    assert!(EntropyEstimator::new(EntropyKind::Renyi { alpha: 1.0 }, Some(0.1), None, 0.1).is_err());
    assert!(EntropyEstimator::new(EntropyKind::Renyi { alpha: 3.0 }, None, None, 0.1).is_ok());
    assert!(newton_girard(&[]).is_err());
    assert!(newton_girard(&[0.5, 0.25]).is_err());
}
