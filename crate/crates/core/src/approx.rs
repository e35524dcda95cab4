//! Polynomial approximants used by the applications.
//!
//! Trigonometric targets (square wave, `e^{−it cos x}`) are returned as
//! [`LaurentPoly`] values. Targets on `[−1, 1]` (logarithm, powers) are
//! returned as [`RealPoly`] values and lifted with [`compose_cosine`].

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc_inv};

use crate::error::{Error, Result};
use crate::laurent::{uniform_grid, LaurentPoly};
use crate::linalg::{c, C64};

/// Factor applied to every approximant so that `|F| < 1` holds strictly.
pub const SAFETY_SCALE: f64 = 1.0 - 1e-8;

/// Largest degree any construction may return.
pub const MAX_DEGREE: usize = 10_000;

/// Points used for sup-norm checks on an interval.
pub const CHECK_POINTS: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Chebyshev,
}

/// Real polynomial on `[−1, 1]` in either the monomial or Chebyshev basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPoly {
    pub basis: Basis,
    pub coefficients: Vec<f64>,
}

impl RealPoly {
    pub fn monomial(coefficients: Vec<f64>) -> Self {
        Self { basis: Basis::Monomial, coefficients }
    }

    pub fn chebyshev(coefficients: Vec<f64>) -> Self {
        Self { basis: Basis::Chebyshev, coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        match self.basis {
            Basis::Monomial => self.coefficients.iter().rev().fold(0.0, |acc, a| acc * y + a),
            Basis::Chebyshev => clenshaw(&self.coefficients, y),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            basis: self.basis,
            coefficients: self.coefficients.iter().map(|a| a * s).collect(),
        }
    }

    /// Product with `y^k`, returned in the Chebyshev basis.
    pub fn times_power(&self, k: usize) -> Self {
        let mut a = self.to_chebyshev().coefficients;
        for _ in 0..k {
            // y·T_0 = T_1, y·T_j = (T_{j+1} + T_{j−1})/2.
            let mut b = vec![0.0; a.len() + 1];
            for (j, &v) in a.iter().enumerate() {
                if j == 0 {
                    b[1] += v;
                } else {
                    b[j + 1] += 0.5 * v;
                    b[j - 1] += 0.5 * v;
                }
            }
            a = b;
        }
        Self::chebyshev(a)
    }

    pub fn to_chebyshev(&self) -> Self {
        match self.basis {
            Basis::Chebyshev => self.clone(),
            Basis::Monomial => {
                // Horner in the Chebyshev basis.
                let mut acc = vec![0.0];
                for &a in self.coefficients.iter().rev() {
                    let mut next = Self::chebyshev(acc).times_power(1).coefficients;
                    next[0] += a;
                    acc = next;
                }
                Self::chebyshev(acc)
            }
        }
    }

    /// `max |p(y)|` on `CHECK_POINTS` samples of `[lo, hi]`.
    pub fn max_abs_on(&self, lo: f64, hi: f64) -> f64 {
        interval_grid(lo, hi).map(|y| self.evaluate(y).abs()).fold(0.0, f64::max)
    }

    /// `max |p(y) − f(y)|` on `CHECK_POINTS` samples of `[lo, hi]`.
    pub fn max_error_on(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        interval_grid(lo, hi)
            .map(|y| (self.evaluate(y) - f(y)).abs())
            .fold(0.0, f64::max)
    }
}

fn clenshaw(a: &[f64], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &v in a.iter().skip(1).rev() {
        let b0 = v + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    a.first().copied().unwrap_or(0.0) + y * b1 - b2
}

fn interval_grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let n = CHECK_POINTS;
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

/// Chebyshev coefficients of `f` from its values at `n` Chebyshev nodes.
fn chebyshev_coefficients(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let nodes: Vec<f64> = (0..n).map(|m| PI * (m as f64 + 0.5) / n as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|t| f(t.cos())).collect();
    (0..n)
        .map(|j| {
            let s: f64 = nodes.iter().zip(&values).map(|(t, v)| v * (j as f64 * t).cos()).sum();
            let w = if j == 0 { 1.0 } else { 2.0 };
            w * s / n as f64
        })
        .collect()
}

/// `F(x) = p(cos x)` as a parity-0 Laurent polynomial.
pub fn compose_cosine(p: &RealPoly) -> LaurentPoly {
    let d = p.degree() as i64;
    let mut terms: Vec<(i64, C64)> = Vec::with_capacity(2 * d as usize + 1);
    match p.basis {
        Basis::Chebyshev => {
            // T_k(cos x) = (e^{ikx} + e^{−ikx})/2.
            for (k, &a) in p.coefficients.iter().enumerate() {
                let k = k as i64;
                if k == 0 {
                    terms.push((0, c(a, 0.0)));
                } else {
                    terms.push((2 * k, c(0.5 * a, 0.0)));
                    terms.push((-2 * k, c(0.5 * a, 0.0)));
                }
            }
        }
        Basis::Monomial => {
            // cos^k x = 2^{−k} Σ_j C(k, j) e^{i(k−2j)x}, accumulated with Horner.
            let mut acc = vec![0.0; 2 * d as usize + 1];
            let mid = d as usize;
            for &a in p.coefficients.iter().rev() {
                let mut next = vec![0.0; acc.len()];
                for (idx, &v) in acc.iter().enumerate() {
                    if v != 0.0 {
                        next[idx + 1] += 0.5 * v;
                        next[idx - 1] += 0.5 * v;
                    }
                }
                next[mid] += a;
                acc = next;
            }
            for (idx, &v) in acc.iter().enumerate() {
                terms.push((2 * (idx as i64 - d), c(v, 0.0)));
            }
        }
    }
    if terms.is_empty() {
        return LaurentPoly::zero(0);
    }
    LaurentPoly::from_terms(&terms).expect("even indices share parity")
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::contract(format!("{name} = {v} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_degree(degree: usize, what: &str) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::Resource(format!(
            "{what} needs degree {degree}, above the cap of {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// Rescale `F` so that its grid maximum is at most [`SAFETY_SCALE`].
/// `max |F|` on the circle: grid local maxima refined by ternary search.
pub fn sup_abs(f: &LaurentPoly) -> f64 {
    let n = 20 * (f.degree() + 1);
    let h = 2.0 * PI / n as f64;
    let at = |k: usize| f.evaluate(-PI + h * k as f64).norm();
    let vals: Vec<f64> = (0..n).map(at).collect();
    let mut best = vals.iter().cloned().fold(0.0, f64::max);
    for k in 0..n {
        let (prev, next) = (vals[(k + n - 1) % n], vals[(k + 1) % n]);
        if vals[k] < prev || vals[k] < next {
            continue;
        }
        let centre = -PI + h * k as f64;
        let (mut lo, mut hi) = (centre - h, centre + h);
        for _ in 0..60 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if f.evaluate(m1).norm() < f.evaluate(m2).norm() {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best = best.max(f.evaluate(0.5 * (lo + hi)).norm());
    }
    best
}

fn bound_laurent(f: &LaurentPoly) -> LaurentPoly {
    let max = sup_abs(f);
    f.scale(c(SAFETY_SCALE / max.max(1.0), 0.0))
}

/// Bounded trigonometric polynomial close to `sgn(sin x)` away from `{−π, 0, π}`.
///
/// Built from the Chebyshev expansion of `erf(k y)` composed with `y = sin x`.
/// The frequency degree `L` (half-index degree `2L`) is padded to a multiple of 4.
pub fn square_wave(delta: f64, eps: f64) -> Result<LaurentPoly> {
    check_open_unit("Delta", delta)?;
    check_open_unit("eps", eps)?;
    let k = erfc_inv(eps / 3.0) / delta.sin();
    // Odd Chebyshev coefficients; the expansion converges like e^{−j²/k²}.
    let mut n = 64usize;
    let coeffs = loop {
        let a = chebyshev_coefficients(n, |y| erf(k * y));
        // Tail of the series beyond the quadrature resolution must be negligible.
        let tail: f64 = a[n * 3 / 4..].iter().map(|v| v.abs()).sum();
        if tail < 1e-3 * eps {
            break a;
        }
        n *= 2;
        check_degree(n / 2, "square wave")?;
    };
    let mut keep = coeffs.len();
    let mut tail = 0.0;
    while keep > 1 {
        let next = tail + coeffs[keep - 1].abs();
        if next > eps / 3.0 {
            break;
        }
        tail = next;
        keep -= 1;
    }
    // Shrinking by the tail bound keeps the truncated series inside [−1, 1].
    let shrink = 1.0 / (1.0 + tail);
    let mut terms = Vec::new();
    for (j, &a) in coeffs.iter().enumerate().take(keep).skip(1).step_by(2) {
        let a = a * shrink;
        // T_j(sin x) = [(−i)^j e^{ijx} + i^j e^{−ijx}]/2.
        let ij = C64::i().powu(j as u32);
        terms.push((2 * j as i64, ij.conj() * 0.5 * a));
        terms.push((-2 * j as i64, ij * 0.5 * a));
    }
    let f = if terms.is_empty() {
        LaurentPoly::zero(0)
    } else {
        LaurentPoly::from_terms(&terms)?
    };
    let degree = f.degree().div_ceil(8) * 8;
    check_degree(degree, "square wave")?;
    Ok(bound_laurent(&f.padded(degree)))
}

/// Grid sup error of `f` against `sgn(sin x)` at points at least `delta`
/// away from `{−π, 0, π}`.
pub fn square_wave_error(f: &LaurentPoly, delta: f64) -> f64 {
    uniform_grid(20 * (f.degree() + 1) + 1)
        .filter(|x| x.abs() >= delta && PI - x.abs() >= delta)
        .map(|x| (f.evaluate(x) - c(x.sin().signum(), 0.0)).norm())
        .fold(0.0, f64::max)
}

/// Bessel functions `J_0..=J_n` at `z` by Miller's downward recurrence.
pub fn bessel_j(n: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let x = z.abs();
    let start = n.max(x as usize) + 30 + (40.0 * (n.max(x as usize) as f64 + 1.0)).sqrt() as usize;
    let start = start + start % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    // J_0 + 2 Σ J_{2k} = 1.
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (k, slot) in out.iter_mut().enumerate() {
        let v = vals[k] / norm;
        *slot = if z < 0.0 && k % 2 == 1 { -v } else { v };
    }
    out
}

/// Truncation order suggested by the asymptotic bound, with constant 1.
pub fn jacobi_anger_order(t: f64, delta: f64) -> usize {
    let t = t.abs();
    let l = (2.0 / (delta * delta)).ln();
    if t == 0.0 {
        return 0;
    }
    (t + l / (E + l / t).ln()).ceil() as usize
}

/// Degree-`n` truncation of `e^{−it cos x} = Σ_k i^k J_k(−t) e^{ikx}`, unscaled.
pub fn jacobi_anger_truncation(t: f64, n: usize) -> LaurentPoly {
    let j = bessel_j(n, -t);
    let mut terms = vec![(0i64, c(j[0], 0.0))];
    for (k, &v) in j.iter().enumerate().skip(1) {
        let ik = C64::i().powu(k as u32);
        // J_{−k} = (−1)^k J_k and i^{−k} = (−i)^k, so both terms carry i^k J_k.
        terms.push((2 * k as i64, ik * v));
        terms.push((-(2 * k as i64), ik * v));
    }
    LaurentPoly::from_terms(&terms).expect("even indices share parity")
}

/// Grid sup error of `f` against `e^{−it cos x}`.
pub fn jacobi_anger_error(f: &LaurentPoly, t: f64) -> f64 {
    uniform_grid(20 * (f.degree() + 1) + 1)
        .map(|x| (f.evaluate(x) - C64::from_polar(1.0, -t * x.cos())).norm())
        .fold(0.0, f64::max)
}

/// Bounded approximant of `e^{−it cos x}` with grid error at most `δ²/4`.
pub fn jacobi_anger(t: f64, delta: f64) -> Result<LaurentPoly> {
    check_open_unit("delta", delta)?;
    if !t.is_finite() {
        return Err(Error::contract("evolution time must be finite"));
    }
    if t == 0.0 {
        return Ok(LaurentPoly::constant(c(SAFETY_SCALE, 0.0)));
    }
    let target = delta * delta / 4.0;
    let mut n = jacobi_anger_order(t, delta).max(1);
    loop {
        check_degree(2 * n, "Jacobi-Anger expansion")?;
        // The safety margin shrinks with the target so that small δ stays reachable.
        let f = jacobi_anger_truncation(t, n);
        let max = sup_abs(&f);
        let margin = 1.0 - (1.0 - SAFETY_SCALE).min(target / 4.0);
        let f = f.scale(c(margin / max.max(1.0), 0.0));
        if jacobi_anger_error(&f, t) <= target {
            return Ok(f);
        }
        n += 1;
    }
}

/// Softplus clamp `ψ(x) = b + w ln(1 + e^{(x−b)/w})`, approximately `max(x, b)`.
fn softplus(x: f64, b: f64, w: f64) -> f64 {
    let u = (x - b) / w;
    let sp = if u > 30.0 { u + (-u).exp().ln_1p() } else { u.exp().ln_1p() };
    b + w * sp
}

/// Chebyshev interpolant of `f∘ψ` meeting `eps` on `[gamma, 1]` and bounded on `[−1, 1]`.
///
/// `f` must be monotone on `(0, 1]` with `|f(b)| < 1`; the clamp keeps the
/// interpolated function smooth and bounded on all of `[−1, 1]`.
fn clamped_interpolant(
    what: &str,
    gamma: f64,
    eps: f64,
    b: f64,
    f: impl Fn(f64) -> f64 + Copy,
) -> Result<RealPoly> {
    // Largest clamp width with error at most eps/4 at x = gamma.
    let clamp_err = |w: f64| (f(softplus(gamma, b, w)) - f(gamma)).abs();
    let (mut lo, mut hi) = (0.0, gamma - b);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if clamp_err(mid) <= eps / 4.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = lo;
    if w <= 0.0 {
        return Err(Error::contract(format!("{what}: no admissible clamp width")));
    }
    let g = move |y: f64| f(softplus(y, b, w));
    let build = |n: usize| {
        let p = RealPoly::chebyshev(chebyshev_coefficients(n + 1, g)).scale(SAFETY_SCALE);
        let ok = p.max_error_on(gamma, 1.0, f) <= eps && p.max_abs_on(-1.0, 1.0) <= 1.0;
        (p, ok)
    };
    let mut n = 8usize;
    let mut last_bad = 0usize;
    let mut best = loop {
        check_degree(n, what)?;
        let (p, ok) = build(n);
        if ok {
            break (n, p);
        }
        last_bad = n;
        n *= 2;
    };
    // Bisect down; the error is not strictly monotone so keep the last success.
    let (mut bad, mut good) = (last_bad, best.0);
    while good - bad > 1 {
        let mid = (bad + good) / 2;
        let (p, ok) = build(mid);
        if ok {
            good = mid;
            best = (mid, p);
        } else {
            bad = mid;
        }
    }
    Ok(best.1)
}

/// Polynomial close to `ln(x)/(2 ln γ)` on `[γ, 1]` and bounded by 1 on `[−1, 1]`.
pub fn log_poly(gamma: f64, eps: f64) -> Result<RealPoly> {
    if !(gamma > 0.0 && gamma <= 0.5) {
        return Err(Error::contract(format!("gamma = {gamma} must lie in (0, 1/2]")));
    }
    check_open_unit("eps", eps)?;
    let scale = 1.0 / (2.0 * gamma.ln());
    clamped_interpolant("logarithm approximant", gamma, eps, gamma.powf(1.8), move |x| {
        x.ln() * scale
    })
}

/// Polynomial close to `(γ^c/2)·x^{−c}` on `[γ, 1]` and bounded by 1 on `[−1, 1]`.
pub fn power_poly(c_exp: f64, gamma: f64, eps: f64) -> Result<RealPoly> {
    if !(c_exp > 0.0 && c_exp < 1.0) {
        return Err(Error::contract(format!("exponent c = {c_exp} must lie in (0, 1)")));
    }
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::contract(format!("gamma = {gamma} must lie in (0, 1/2)")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::contract(format!("eps = {eps} must lie in (0, 1/2)")));
    }
    // The clamp floor keeps |f| ≤ 0.9 on [−1, 1].
    let b = gamma * 1.8f64.powf(-1.0 / c_exp).max(0.25);
    let pre = 0.5 * gamma.powf(c_exp);
    clamped_interpolant("power approximant", gamma, eps, b, move |x| pre * x.powf(-c_exp))
}

/// Polynomial close to `x^s / (2 ln(2e/γ))` on `[γ, 1]` for `s ∈ (0, 1)`.
pub fn fractional_monomial_poly(s: f64, gamma: f64, eps: f64) -> Result<RealPoly> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::contract(format!("fractional exponent {s} must lie in (0, 1)")));
    }
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::contract(format!("gamma = {gamma} must lie in (0, 1/2)")));
    }
    check_open_unit("eps", eps)?;
    let scale = fractional_monomial_scale(gamma);
    clamped_interpolant("fractional power approximant", gamma, eps, gamma / 3.0, move |x| {
        x.powf(s) / scale
    })
}

/// Normalization `2 ln(2e/γ)` used by [`fractional_monomial_poly`].
pub fn fractional_monomial_scale(gamma: f64) -> f64 {
    2.0 * (2.0 * E / gamma).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_cosine_small_cases() {
        let f = compose_cosine(&RealPoly::monomial(vec![0.0, 1.0]));
        assert!((f.coeff(2) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coeff(-2) - c(0.5, 0.0)).norm() < 1e-15);
        let f = compose_cosine(&RealPoly::monomial(vec![0.0, 0.0, 1.0]));
        assert!((f.coeff(4) - c(0.25, 0.0)).norm() < 1e-15);
        assert!((f.coeff(0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coeff(-4) - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn monomial_to_chebyshev_agrees() {
        let p = RealPoly::monomial(vec![0.3, -1.0, 0.5, 2.0, -0.25]);
        let q = p.to_chebyshev();
        for k in 0..21 {
            let y = -1.0 + 0.1 * k as f64;
            assert!((p.evaluate(y) - q.evaluate(y)).abs() < 1e-13);
        }
    }

    #[test]
    fn bessel_zero_order_at_one() {
        let j = bessel_j(3, 1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-14);
    }

    #[test]
    fn jacobi_anger_zero_time_is_constant() {
        let f = jacobi_anger(0.0, 1e-3).unwrap();
        assert_eq!(f.degree(), 0);
    }
}
