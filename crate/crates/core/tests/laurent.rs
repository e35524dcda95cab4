use proptest::prelude::*;
use qppkit::laurent::{complement, roots, unit_circle_residual, verification_grid};
use qppkit::linalg::{c, rng_from_seed};
use qppkit::{LaurentPoly, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_poly(l: usize, rng: &mut ChaCha8Rng) -> LaurentPoly {
    let terms: Vec<(i64, C64)> = (0..=l)
        .map(|k| (-(l as i64) + 2 * k as i64, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    LaurentPoly::from_terms(&terms).unwrap()
}

fn bounded(l: usize, rng: &mut ChaCha8Rng) -> LaurentPoly {
    let p = random_poly(l, rng);
    let m = p.grid_max_abs(20 * (l + 1) + 1);
    p.scale(c(0.95 / m, 0.0))
}

#[test]
fn half_frequency_at_pi() {
    let p = LaurentPoly::from_terms(&[(1, c(1.0, 0.0))]).unwrap();
    assert!((p.evaluate(std::f64::consts::PI) - c(0.0, 1.0)).norm() < 1e-15);
}

#[test]
fn complement_of_half_cosine() {
    let p = LaurentPoly::from_terms(&[(-1, c(0.5, 0.0)), (1, c(0.5, 0.0))]).unwrap();
    let q = complement(&p).unwrap();
    assert_eq!(q.parity(), 1);
    for x in verification_grid(10) {
        assert!((q.evaluate(x).norm() - (0.5 * x).sin().abs()).abs() < 1e-8);
    }
}

#[test]
fn roots_of_quadratics() {
    let mut r = roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    r.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert!((r[0] + 1.0).norm() < 1e-12 && (r[1] - 1.0).norm() < 1e-12);
    let mut r = roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    r.sort_by(|a, b| a.im.total_cmp(&b.im));
    assert!((r[0] + c(0.0, 1.0)).norm() < 1e-12 && (r[1] - c(0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn complement_rejects_unbounded_input() {
    let p = LaurentPoly::constant(c(1.2, 0.0));
    assert!(matches!(complement(&p), Err(qppkit::Error::Contract(_))));
}

/// Ascending coefficients of `lead · Π (ξ − r_k)`, from products sampled at
/// the roots of unity and an inverse DFT; expanding the product term by term
/// loses about 1e-6 to cancellation at degree 45.
fn expand(lead: C64, rs: &[C64]) -> Vec<C64> {
    let m = rs.len() + 1;
    let values: Vec<C64> = (0..m)
        .map(|j| {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            rs.iter().fold(lead, |acc, &r| acc * (w - r))
        })
        .collect();
    (0..m)
        .map(|k| {
            values.iter().enumerate().fold(c(0.0, 0.0), |acc, (j, &v)| {
                let t = -2.0 * std::f64::consts::PI * (j * k % m) as f64 / m as f64;
                acc + v * C64::from_polar(1.0, t)
            }) / m as f64
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arithmetic_keeps_parity(seed in any::<u64>(), a in 0usize..12, b in 0usize..12) {
        let mut rng = rng_from_seed(seed);
        let p = random_poly(a, &mut rng);
        let q = random_poly(b, &mut rng);
        let prod = p.mul(&q);
        prop_assert_eq!(prod.parity() as usize, (a + b) % 2);
        prop_assert!(prod.terms().all(|(j, _)| j.rem_euclid(2) as usize == (a + b) % 2));
        if a % 2 == b % 2 {
            let sum = p.add(&q).unwrap();
            prop_assert!(sum.terms().all(|(j, _)| j.rem_euclid(2) as usize == a % 2));
        } else {
            prop_assert!(p.add(&q).is_err());
        }
        let x = rng.gen_range(-3.0..3.0);
        prop_assert!((prod.evaluate(x) - p.evaluate(x) * q.evaluate(x)).norm() < 1e-10);
    }

    #[test]
    fn complement_satisfies_unit_circle(seed in any::<u64>(), l in 1usize..=100) {
        let p = bounded(l, &mut rng_from_seed(seed));
        let q = complement(&p).unwrap();
        prop_assert_eq!(q.parity(), p.parity());
        prop_assert!(q.degree() <= p.degree());
        prop_assert!(unit_circle_residual(&p, &q) <= 1e-7);
    }

    #[test]
    fn roots_reconstruct_polynomial(seed in any::<u64>(), n in 1usize..=80) {
        let mut rng = rng_from_seed(seed);
        let g: Vec<C64> = (0..=n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let rs = roots(&g).unwrap();
        prop_assert_eq!(rs.len(), n);
        let back = expand(g[n], &rs);
        let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = back.iter().zip(&g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
        prop_assert!(err <= 1e-6, "degree {n}: relative coefficient error {err:e}");
    }
}
