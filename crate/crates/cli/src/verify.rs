//! Quick invariant suite behind `qppkit verify`.
//!
//! Each check draws a few seeded random instances, compares a module against
//! a dense oracle and reports the worst deviation it saw.

use qppkit::approx::{
    compose_cosine, jacobi_anger, jacobi_anger_error, log_poly, square_wave, square_wave_error,
    RealPoly,
};
use qppkit::blockenc::{
    encode_hermitian, expected_flagged_phases, flagged_eigenphases, phase_multiset_distance,
    purified_oracle, qubitize,
};
use qppkit::entropy::{newton_girard, trace_rho_f_sigma, Mode};
use qppkit::hamsim::{simulate, SimRequest};
use qppkit::laurent::{complement, unit_circle_residual};
use qppkit::linalg::{
    c, eig_hermitian, eig_unitary, hermitian_function, max_abs_diff, partial_trace_tail,
    rng_from_seed, ComplexMatrix,
};
use qppkit::phasesearch::{
    amplitude_estimation, circular_distance, period_config, period_finding, quantum_phase_search,
    QpsConfig,
};
use qppkit::qpp::{build, phase_evaluate, verify_eigenspace};
use qppkit::qsp::{find_angles, round_trip_error};
use qppkit::random::{haar_unitary, random_density, random_hermitian};
use qppkit::{LaurentPoly, StateVector, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::Report;

type Outcome = qppkit::Result<(bool, String)>;

struct Check {
    name: &'static str,
    run: fn(&mut ChaCha8Rng) -> Outcome,
}

fn within(value: f64, tol: f64) -> (bool, String) {
    (value <= tol, format!("worst {value:.3e} (tolerance {tol:.0e})"))
}

/// Random Laurent polynomial of half-index degree `l`, scaled to sup-norm 0.9.
fn bounded_poly(l: usize, rng: &mut ChaCha8Rng) -> LaurentPoly {
    let terms: Vec<(i64, C64)> = (0..=l)
        .map(|k| -(l as i64) + 2 * k as i64)
        .map(|j| (j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let p = LaurentPoly::from_terms(&terms).expect("shared parity");
    let m = p.grid_max_abs(20 * (l + 1) + 1);
    p.scale(c(0.9 / m, 0.0))
}

fn complement_unit_circle(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for l in [3, 8, 15] {
        let p = bounded_poly(l, rng);
        let q = complement(&p)?;
        worst = worst.max(unit_circle_residual(&p, &q));
    }
    Ok(within(worst, 1e-8))
}

fn angle_round_trip(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for l in [4, 16] {
        let p = bounded_poly(l, rng);
        let q = complement(&p)?;
        let a = find_angles(&p, &q)?;
        worst = worst.max(round_trip_error(&a, &p, &q));
    }
    Ok(within(worst, 1e-6))
}

fn eigenspace_blocks(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for l in [5, 6] {
        let p = bounded_poly(l, rng);
        let a = find_angles(&p, &complement(&p)?)?;
        let u = haar_unitary(4, rng);
        worst = worst.max(verify_eigenspace(&build(a, u)?)?);
    }
    Ok(within(worst, 1e-8))
}

fn phase_evaluation(rng: &mut ChaCha8Rng) -> Outcome {
    let f = compose_cosine(&RealPoly::monomial(vec![0.2, -0.5, 0.0, 0.3]));
    let u = haar_unitary(4, rng);
    let rho = random_density(4, 4, 0.0, rng);
    let got = phase_evaluate(&f, &u, &rho)?;
    let spec = eig_unitary(&u)?;
    let want: f64 = spec
        .phases()
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let v = spec.eigenvector(j);
            (v.adjoint() * &rho * &v)[(0, 0)].re * f.evaluate(t).re
        })
        .sum();
    Ok(within((got - want).abs(), 1e-6))
}

fn approximant_bounds(_: &mut ChaCha8Rng) -> Outcome {
    let sw = square_wave(0.2, 1e-3)?;
    let ja = jacobi_anger(2.0, 1e-3)?;
    let lp = log_poly(0.1, 1e-2)?;
    let s = 1.0 / (2.0 * 0.1f64.ln());
    let errs = [
        square_wave_error(&sw, 0.2) / 1e-3,
        jacobi_anger_error(&ja, 2.0) / (1e-6 / 4.0),
        lp.max_error_on(0.1, 1.0, |x| x.ln() * s) / 1e-2,
    ];
    let bounded = sw.grid_max_abs(4001) <= 1.0 && ja.grid_max_abs(4001) <= 1.0 && lp.max_abs_on(-1.0, 1.0) <= 1.0;
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    Ok((worst <= 1.0 && bounded, format!("worst error/target {worst:.3}, bounded {bounded}")))
}

fn qubitization_law(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let h = random_hermitian(4, 1.0, rng);
        let q = qubitize(&encode_hermitian(&h, 1.5)?)?;
        let eigs: Vec<f64> = eig_hermitian(&q.block())?.eigenvalues.iter().map(|z| z.re).collect();
        let d = phase_multiset_distance(&flagged_eigenphases(&q)?, &expected_flagged_phases(&eigs));
        worst = worst.max(d);
    }
    Ok(within(worst, 1e-7))
}

fn purification(rng: &mut ChaCha8Rng) -> Outcome {
    let rho = random_density(4, 3, 0.0, rng);
    let u = purified_oracle(&rho)?;
    let psi = u.column(0).into_owned();
    let reduced = partial_trace_tail(&(&psi * psi.adjoint()), 2);
    Ok(within(max_abs_diff(&reduced, &rho), 1e-10))
}

fn phase_search(rng: &mut ChaCha8Rng) -> Outcome {
    let tau = std::f64::consts::PI / 3.0;
    let mut u = ComplexMatrix::identity(2, 2);
    u[(1, 1)] = C64::from_polar(1.0, tau);
    let cfg = QpsConfig::with_defaults(0.1, 1e-4)?;
    let chi = StateVector::basis(2, 1)?;
    let out = quantum_phase_search(&u, &chi, cfg, rng)?;
    Ok(within(circular_distance(out.estimate, tau), 1e-4))
}

fn order_finding(rng: &mut ChaCha8Rng) -> Outcome {
    let out = period_finding(7, 15, period_config(15, 0.1)?, rng)?;
    Ok((out.order == Some(4), format!("order {:?} after {} attempts", out.order, out.attempts)))
}

fn amplitude(rng: &mut ChaCha8Rng) -> Outcome {
    let a = qppkit::linalg::gates::ry(2.0 * 0.6f64.asin());
    let out = amplitude_estimation(&a, QpsConfig::with_defaults(0.1, 1e-3)?, rng)?;
    Ok(within((out.amplitude - 0.6).abs(), 2e-3))
}

fn hamiltonian_simulation(rng: &mut ChaCha8Rng) -> Outcome {
    let h = random_hermitian(4, 1.0, rng);
    let out = simulate(&SimRequest::new(h, 2.0, 1e-3))?;
    Ok(within(out.error_vs_exact, 1e-3 + 1e-5))
}

fn trace_estimator(rng: &mut ChaCha8Rng) -> Outcome {
    let rho = random_density(4, 4, 0.0, rng);
    let sigma = random_density(4, 4, 0.0, rng);
    let f = RealPoly::monomial(vec![0.0, 0.0, 1.0]);
    let enc = qppkit::blockenc::density_block_encoding(&purified_oracle(&sigma)?)?;
    let got = trace_rho_f_sigma(&purified_oracle(&rho)?, &enc, &f, Mode::Exact, 0)?;
    let want = (&rho * hermitian_function(&sigma, |x| c(x * x, 0.0))?).trace().re;
    Ok(within((got.value - want).abs(), 1e-6))
}

fn spectroscopy(_: &mut ChaCha8Rng) -> Outcome {
    let eig = newton_girard(&[1.0, 0.54, 0.352])?;
    let worst = eig.iter().zip([0.7, 0.2, 0.1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(within(worst, 1e-9))
}

const CHECKS: &[Check] = &[
    Check { name: "laurent.complement_unit_circle", run: complement_unit_circle },
    Check { name: "qsp.angle_round_trip", run: angle_round_trip },
    Check { name: "qpp.eigenspace_blocks", run: eigenspace_blocks },
    Check { name: "qpp.phase_evaluation", run: phase_evaluation },
    Check { name: "approx.bounds_and_errors", run: approximant_bounds },
    Check { name: "blockenc.qubitization_phases", run: qubitization_law },
    Check { name: "blockenc.purification", run: purification },
    Check { name: "phasesearch.estimate", run: phase_search },
    Check { name: "phasesearch.order_finding", run: order_finding },
    Check { name: "phasesearch.amplitude_estimation", run: amplitude },
    Check { name: "hamsim.evolution_error", run: hamiltonian_simulation },
    Check { name: "entropy.trace_estimator", run: trace_estimator },
    Check { name: "entropy.newton_girard", run: spectroscopy },
];

/// Runs every check with its own seeded generator.
pub fn run_suite(seed: u64) -> Vec<(String, bool, String)> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(k, check)| {
            let mut rng = rng_from_seed(seed.wrapping_add(k as u64));
            match (check.run)(&mut rng) {
                Ok((pass, detail)) => (check.name.to_string(), pass, detail),
                Err(e) => (check.name.to_string(), false, format!("error: {e}")),
            }
        })
        .collect()
}

pub fn report(seed: u64) -> Report {
    let results = run_suite(seed);
    let failed = results.iter().filter(|r| !r.1).count();
    let rows: Vec<Map<String, Value>> = results
        .iter()
        .map(|(name, pass, detail)| {
            let Value::Object(m) = json!({ "name": name, "passed": pass, "detail": detail }) else {
                unreachable!()
            };
            m
        })
        .collect();
    let Value::Object(fields) = json!({ "passed": results.len() - failed, "failed": failed }) else {
        unreachable!()
    };
    Report { fields, rows, query_count: 0, exit_code: i32::from(failed > 0) }
}
