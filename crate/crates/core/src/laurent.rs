//! Laurent polynomials in `e^{ix/2}` and their complementary polynomials.
//!
//! A polynomial stores coefficients `c_j` for `j ∈ [−L, L]` and represents
//! `Σ_j c_j e^{ijx/2}`. Only indices with `j ≡ parity (mod 2)` may be nonzero.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    degree: usize,
    parity: u8,
    /// `coeffs[j + degree]` multiplies `e^{ijx/2}`.
    coeffs: Vec<C64>,
}

impl LaurentPoly {
    pub fn zero(parity: u8) -> Self {
        Self::with_degree(parity as usize % 2, parity)
    }

    fn with_degree(degree: usize, parity: u8) -> Self {
        Self {
            degree,
            parity: parity % 2,
            coeffs: vec![c(0.0, 0.0); 2 * degree + 1],
        }
    }

    /// Builds a polynomial from `(j, c_j)` pairs. All indices must share a parity.
    pub fn from_terms(terms: &[(i64, C64)]) -> Result<Self> {
        let parity = terms.first().map_or(0, |(j, _)| j.rem_euclid(2) as u8);
        let degree = terms.iter().map(|(j, _)| j.unsigned_abs() as usize).max().unwrap_or(0);
        let mut p = Self::with_degree(degree.max(parity as usize), parity);
        for &(j, v) in terms {
            if j.rem_euclid(2) as u8 != parity {
                return Err(Error::contract(format!(
                    "index {j} breaks parity {parity} of the other terms"
                )));
            }
            p.coeffs[(j + p.degree as i64) as usize] += v;
        }
        Ok(p)
    }

    /// Builds a polynomial from a dense coefficient vector for `j = −L..=L`.
    pub fn from_dense(coeffs: Vec<C64>, parity: u8) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::contract("dense coefficient vector must have odd length"));
        }
        let degree = coeffs.len() / 2;
        let parity = parity % 2;
        for (k, v) in coeffs.iter().enumerate() {
            let j = k as i64 - degree as i64;
            if j.rem_euclid(2) as u8 != parity && v.norm() != 0.0 {
                return Err(Error::contract(format!(
                    "nonzero coefficient at index {j} violates parity {parity}"
                )));
            }
        }
        Ok(Self { degree, parity, coeffs })
    }

    pub fn constant(v: C64) -> Self {
        let mut p = Self::with_degree(0, 0);
        p.coeffs[0] = v;
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    /// Dense coefficients for `j = −L..=L`.
    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: i64) -> C64 {
        if j.unsigned_abs() as usize > self.degree {
            return c(0.0, 0.0);
        }
        self.coeffs[(j + self.degree as i64) as usize]
    }

    /// Iterator over `(j, c_j)` for the indices allowed by the parity.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let l = self.degree as i64;
        (-l..=l)
            .filter(move |j| j.rem_euclid(2) as u8 == self.parity)
            .map(move |j| (j, self.coeff(j)))
    }

    pub fn evaluate(&self, x: f64) -> C64 {
        // Horner in e^{ix/2}, starting from the lowest index.
        let w = C64::from_polar(1.0, 0.5 * x);
        let mut acc = c(0.0, 0.0);
        for v in self.coeffs.iter().rev() {
            acc = acc * w + v;
        }
        acc * C64::from_polar(1.0, -0.5 * x * self.degree as f64)
    }

    /// Nominal degree raised to `degree` (must keep `degree ≥ current`).
    pub fn padded(&self, degree: usize) -> Self {
        assert!(degree >= self.degree);
        let mut p = Self::with_degree(degree, self.parity);
        for (j, v) in self.terms() {
            p.coeffs[(j + degree as i64) as usize] = v;
        }
        p
    }

    /// Drops outer coefficients with modulus ≤ `tol`, shrinking the degree.
    pub fn trimmed(&self, tol: f64) -> Self {
        let mut d = self.degree as i64;
        while d > self.parity as i64
            && self.coeff(d).norm() <= tol
            && self.coeff(-d).norm() <= tol
        {
            d -= 1;
        }
        let mut p = Self::with_degree(d as usize, self.parity);
        for j in -d..=d {
            p.coeffs[(j + d) as usize] = self.coeff(j);
        }
        p
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = self.clone();
        p.coeffs.iter_mut().for_each(|v| *v *= s);
        p
    }

    /// Pointwise complex conjugate on the real line: `c_j ↦ conj(c_{−j})`.
    pub fn conj(&self) -> Self {
        let mut p = self.clone();
        let n = p.coeffs.len();
        for k in 0..n {
            p.coeffs[k] = self.coeffs[n - 1 - k].conj();
        }
        p
    }

    /// Multiplies by `e^{ikx/2}`.
    pub fn shift(&self, k: i64) -> Self {
        let parity = ((self.parity as i64 + k).rem_euclid(2)) as u8;
        let degree = (self.degree as i64 + k.abs()) as usize;
        let mut p = Self::with_degree(degree, parity);
        for (j, v) in self.terms() {
            p.coeffs[(j + k + degree as i64) as usize] = v;
        }
        p
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.parity != other.parity {
            return Err(Error::contract("cannot add polynomials of different parity"));
        }
        let degree = self.degree.max(other.degree);
        let mut p = Self::with_degree(degree, self.parity);
        for (j, v) in self.terms().chain(other.terms()) {
            p.coeffs[(j + degree as i64) as usize] += v;
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut p = Self::with_degree(degree, (self.parity + other.parity) % 2);
        for (i, a) in self.terms() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, b) in other.terms() {
                p.coeffs[(i + j + degree as i64) as usize] += a * b;
            }
        }
        p
    }

    /// Largest deviation from Hermitian symmetry `c_{−j} = conj(c_j)`.
    pub fn real_symmetry_residual(&self) -> f64 {
        self.terms()
            .map(|(j, v)| (v - self.coeff(-j).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Maximum of `|p(x)|` over `points` uniform samples of `[−π, π]`.
    pub fn grid_max_abs(&self, points: usize) -> f64 {
        uniform_grid(points)
            .map(|x| self.evaluate(x).norm())
            .fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli, an upper bound on `sup |p|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm()).sum()
    }
}

/// `points` equally spaced samples of `[−π, π]`, endpoints included.
pub fn uniform_grid(points: usize) -> impl Iterator<Item = f64> {
    let n = points.max(2);
    (0..n).map(move |k| -PI + 2.0 * PI * k as f64 / (n - 1) as f64)
}

/// Verification grid used for a degree-`l` object: `10·(l+1)+1` points.
pub fn verification_grid(l: usize) -> impl Iterator<Item = f64> {
    uniform_grid(10 * (l + 1) + 1)
}

/// `max_x | |p(x)|² + |q(x)|² − 1 |` on the verification grid.
pub fn unit_circle_residual(p: &LaurentPoly, q: &LaurentPoly) -> f64 {
    verification_grid(p.degree.max(q.degree))
        .map(|x| (p.evaluate(x).norm_sqr() + q.evaluate(x).norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// All roots of `Σ_k g[k] ξ^k` (ascending coefficients), with multiplicity.
///
/// Eigenvalues of the balanced companion matrix, each refined by Newton steps
/// on the original polynomial.
pub fn roots(g: &[C64]) -> Result<Vec<C64>> {
    let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::contract("root finding on the zero polynomial"));
    }
    let mut hi = g.len() - 1;
    while g[hi].norm() <= 1e-14 * scale {
        hi -= 1;
    }
    let mut lo = 0;
    while g[lo].norm() == 0.0 {
        lo += 1;
    }
    let mut out = vec![c(0.0, 0.0); lo];
    let poly = &g[lo..=hi];
    let n = poly.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        out.push(-poly[0] / poly[1]);
        return Ok(out);
    }
    let lead = poly[n];
    let mut comp = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = c(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -poly[i] / lead;
    }
    balance(&mut comp);
    for z in hessenberg_eigenvalues(&comp)? {
        out.push(polish(poly, z));
    }
    Ok(out)
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR.
///
/// Only the active window is updated since no Schur vectors are needed.
fn hessenberg_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    let mut h: Vec<C64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            h.push(m[(i, j)]);
        }
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut eig = vec![c(0.0, 0.0); n];
    let mut rot: Vec<(f64, C64)> = vec![(1.0, c(0.0, 0.0)); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[idx(0, 0)];
            break;
        }
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[idx(lo, lo - 1)].l1_norm();
            let diag = h[idx(lo - 1, lo - 1)].l1_norm() + h[idx(lo, lo)].l1_norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[idx(lo, lo - 1)] = c(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[idx(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > 60 || total > 60 * n {
            return Err(Error::Conditioning {
                step: hi,
                detail: "Hessenberg QR iteration did not converge".into(),
                residual: h[idx(hi, hi - 1)].norm(),
            });
        }
        let shift = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            h[idx(hi, hi)] + c(h[idx(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            let a = h[idx(hi - 1, hi - 1)];
            let b = h[idx(hi - 1, hi)];
            let cc = h[idx(hi, hi - 1)];
            let d = h[idx(hi, hi)];
            let tr_half = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * cc).sqrt();
            let (l1, l2) = (tr_half + disc, tr_half - disc);
            if (l1 - d).norm() <= (l2 - d).norm() { l1 } else { l2 }
        };
        for k in lo..=hi {
            h[idx(k, k)] -= shift;
        }
        for k in lo..hi {
            let a = h[idx(k, k)];
            let b = h[idx(k + 1, k)];
            let nrm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (cs, sn) = if nrm == 0.0 {
                (1.0, c(0.0, 0.0))
            } else if a.norm() == 0.0 {
                (0.0, c(1.0, 0.0))
            } else {
                let alpha = a / a.norm();
                (a.norm() / nrm, alpha * b.conj() / nrm)
            };
            rot[k] = (cs, sn);
            for j in k..=hi {
                let x = h[idx(k, j)];
                let y = h[idx(k + 1, j)];
                h[idx(k, j)] = x * cs + sn * y;
                h[idx(k + 1, j)] = -sn.conj() * x + y * cs;
            }
        }
        for k in lo..hi {
            let (cs, sn) = rot[k];
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let x = h[idx(i, k)];
                let y = h[idx(i, k + 1)];
                h[idx(i, k)] = x * cs + y * sn.conj();
                h[idx(i, k + 1)] = -x * sn + y * cs;
            }
        }
        for k in lo..=hi {
            h[idx(k, k)] += shift;
        }
    }
    Ok(eig)
}

/// Parlett–Reinsch diagonal balancing in powers of two.
fn balance(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 100 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].l1_norm();
                    row += m[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let s = col + row;
            let mut f = 1.0;
            let mut cc = col;
            while cc < row / radix {
                cc *= radix * radix;
                f *= radix;
            }
            while cc >= row * radix {
                cc /= radix * radix;
                f /= radix;
            }
            let _ = cc;
            if (col * f * f + row) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Evaluates `p` and `p'` at `z`; for `|z| > 1` works with the reversed
/// polynomial to avoid overflow and returns the Newton step directly.
fn newton_step(p: &[C64], z: C64) -> (C64, f64) {
    let n = p.len() - 1;
    if z.norm() <= 1.0 {
        let mut v = p[n];
        let mut d = c(0.0, 0.0);
        for k in (0..n).rev() {
            d = d * z + v;
            v = v * z + p[k];
        }
        if d.norm() == 0.0 {
            return (c(0.0, 0.0), v.norm());
        }
        (v / d, v.norm())
    } else {
        // p(z) = z^n r(w), w = 1/z, r reversed; p'/p = n/z − w² r'(w)/(z r(w))… use
        // the identity p/p' = 1 / (n w − w² r'(w)/r(w)).
        let w = z.inv();
        let mut v = p[0];
        let mut d = c(0.0, 0.0);
        for k in 1..=n {
            d = d * w + v;
            v = v * w + p[k];
        }
        if v.norm() == 0.0 {
            return (c(0.0, 0.0), 0.0);
        }
        let denom = w * n as f64 - w * w * d / v;
        if denom.norm() == 0.0 {
            return (c(0.0, 0.0), v.norm());
        }
        (denom.inv(), v.norm() * z.norm().powi(n as i32).min(f64::MAX))
    }
}

fn polish(p: &[C64], z0: C64) -> C64 {
    let mut z = z0;
    let (_, mut best) = newton_step(p, z);
    for _ in 0..8 {
        let (step, _) = newton_step(p, z);
        let cand = z - step;
        let (_, val) = newton_step(p, cand);
        if !(val < best) || !cand.re.is_finite() || !cand.im.is_finite() {
            break;
        }
        best = val;
        z = cand;
    }
    z
}

/// Tolerance for accepting `r, s` as an inverse-conjugate pair.
pub const PAIRING_TOL: f64 = 1e-5;

fn pairing_residual(r: C64, s: C64) -> f64 {
    (r * s.conj() - 1.0).norm() / r.norm_sqr().max(1.0).min(s.norm_sqr().max(1.0))
}

/// Splits roots into inverse-conjugate pairs `{w, 1/w̄}` and keeps the member
/// with `|w| ≥ 1` from each. Returns the kept roots and the worst residual.
pub fn pair_roots(roots: &[C64]) -> Result<(Vec<C64>, f64)> {
    let n = roots.len();
    if n % 2 != 0 {
        return Err(Error::Conditioning {
            step: 0,
            detail: format!("odd number of roots ({n}) cannot be paired"),
            residual: f64::INFINITY,
        });
    }
    let mut candidates = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            candidates.push((pairing_residual(roots[i], roots[j]), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used = vec![false; n];
    let mut kept = Vec::with_capacity(n / 2);
    let mut worst = 0.0f64;
    for (res, i, j) in candidates {
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        worst = worst.max(res);
        let (a, b) = (roots[i], roots[j]);
        kept.push(if a.norm() >= b.norm() { a } else { b });
        if kept.len() == n / 2 {
            break;
        }
    }
    if worst > PAIRING_TOL {
        return Err(Error::Conditioning {
            step: 0,
            detail: "roots do not form inverse-conjugate pairs".into(),
            residual: worst,
        });
    }
    Ok((kept, worst))
}

/// Factor `Q` with `|Q(x)|² = A(x)` for a nonnegative parity-0 polynomial `A`.
///
/// `A` is written as a polynomial in `z = e^{ix}`; its roots come in pairs
/// `{w, 1/w̄}` and `Q` collects one root from each pair. The result has
/// degree `target_degree` and parity `target_degree mod 2`.
pub fn sqrt_nonnegative(a: &LaurentPoly, target_degree: usize) -> Result<LaurentPoly> {
    if a.parity != 0 {
        return Err(Error::contract("nonnegative factorization needs a parity-0 polynomial"));
    }
    let parity = (target_degree % 2) as u8;
    let scale = a.l1_norm();
    if scale <= 1e-14 {
        return Ok(LaurentPoly::with_degree(target_degree, parity));
    }
    // Symmetrize so A is exactly real on the unit circle.
    let half = a.degree as i64 / 2;
    let sym = |k: i64| 0.5 * (a.coeff(2 * k) + a.coeff(-2 * k).conj());
    let mut m = half;
    while m > 0 && sym(m).norm() <= 1e-15 * scale {
        m -= 1;
    }
    if 2 * m as usize > 2 * target_degree {
        return Err(Error::contract(format!(
            "A has half-degree {} which exceeds 2·{target_degree}",
            2 * m
        )));
    }
    let mut kept = Vec::new();
    let top = sym(m);
    if m > 0 {
        let g: Vec<C64> = (-m..=m).map(sym).collect();
        let rts = roots(&g)?;
        kept = pair_roots(&rts)?.0;
    }
    // |c| = |a_top| / Π|w_k|, kept as a log to survive large degrees.
    let log_sqrt_c = 0.5 * (top.norm().ln() - kept.iter().map(|w| w.norm().ln()).sum::<f64>());
    let mm = m as usize;
    let npts = mm + 1;
    let values: Vec<C64> = (0..npts)
        .map(|k| {
            let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / npts as f64);
            let log: C64 = kept.iter().map(|w| (z - w).ln()).sum();
            (log + log_sqrt_c).exp()
        })
        .collect();
    // Interpolate the degree-m polynomial in z exactly from its values.
    let mut qz = vec![c(0.0, 0.0); npts];
    for (j, slot) in qz.iter_mut().enumerate() {
        let mut s = c(0.0, 0.0);
        for (k, v) in values.iter().enumerate() {
            s += v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / npts as f64);
        }
        *slot = s / npts as f64;
    }
    // Q(x) = e^{−iLx/2} Σ_k q_k e^{ikx}: index j = 2k − L.
    let mut q = LaurentPoly::with_degree(target_degree, parity);
    for (k, v) in qz.iter().enumerate() {
        let j = 2 * k as i64 - target_degree as i64;
        q.coeffs[(j + target_degree as i64) as usize] = *v;
    }
    Ok(q)
}

/// Complementary polynomial: `Q` with `|P|² + |Q|² = 1`, same degree and parity.
pub fn complement(p: &LaurentPoly) -> Result<LaurentPoly> {
    let max = p.grid_max_abs(4 * (p.degree + 1));
    if max > 1.0 + 1e-9 {
        return Err(Error::contract(format!(
            "|P| reaches {max:.12} on the grid; it must not exceed 1"
        )));
    }
    let one = LaurentPoly::constant(c(1.0, 0.0));
    let a = one.sub(&p.mul(&p.conj()))?;
    // Coefficients at the round-off level of the subtraction carry no
    // information but scatter the large roots; drop them.
    let floor = 8.0 * f64::EPSILON * (1.0 + p.l1_norm().powi(2));
    let chopped = a.coeffs.iter().map(|v| if v.norm() <= floor { c(0.0, 0.0) } else { *v }).collect();
    let a = LaurentPoly::from_dense(chopped, 0)?;
    sqrt_nonnegative(&a, p.degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bounded(degree: usize, rng: &mut ChaCha8Rng) -> LaurentPoly {
        let parity = (degree % 2) as u8;
        let terms: Vec<(i64, C64)> = (-(degree as i64)..=degree as i64)
            .filter(|j| j.rem_euclid(2) as u8 == parity)
            .map(|j| (j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let p = LaurentPoly::from_terms(&terms).unwrap();
        let max = p.grid_max_abs(40 * (degree + 1));
        p.scale(c(0.9 / max, 0.0))
    }

    #[test]
    fn evaluate_basic_terms() {
        let p = LaurentPoly::from_terms(&[(1, c(1.0, 0.0))]).unwrap();
        assert!((p.evaluate(PI) - c(0.0, 1.0)).norm() < 1e-15);
        let q = LaurentPoly::from_terms(&[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))]).unwrap();
        for x in uniform_grid(50) {
            assert!((q.evaluate(x).re - (0.5 * x).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn evaluate_matches_term_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_bounded(20, &mut rng);
        for x in uniform_grid(1000) {
            let direct: C64 = p
                .terms()
                .map(|(j, v)| v * C64::from_polar(1.0, 0.5 * j as f64 * x))
                .sum();
            assert!((p.evaluate(x) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn multiply_products() {
        let a = LaurentPoly::from_terms(&[(1, c(1.0, 0.0))]).unwrap();
        let b = LaurentPoly::from_terms(&[(-1, c(1.0, 0.0))]).unwrap();
        let ab = a.mul(&b).trimmed(0.0);
        assert_eq!(ab.degree(), 0);
        assert!((ab.coeff(0) - 1.0).norm() < 1e-15);
        let z = a.mul(&LaurentPoly::zero(0));
        assert_eq!(z.l1_norm(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_bounded(15, &mut rng);
        let q = random_bounded(15, &mut rng);
        let pq = p.mul(&q);
        assert_eq!(pq.parity(), 0);
        for x in uniform_grid(300) {
            assert!((pq.evaluate(x) - p.evaluate(x) * q.evaluate(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn roots_of_simple_quadratics() {
        let mut r = roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] + 1.0).norm() < 1e-14 && (r[1] - 1.0).norm() < 1e-14);
        let mut r = roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] + c(0.0, 1.0)).norm() < 1e-14 && (r[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!(roots(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn roots_reconstruct_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 80;
        let g: Vec<C64> = (0..=n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let r = roots(&g).unwrap();
        assert_eq!(r.len(), n);
        // Coefficients of lead·Π(ξ − r_k), recovered by a DFT of its values on
        // the unit circle (direct expansion suffers from cancellation).
        let m = n + 1;
        let prod: Vec<C64> = (0..m)
            .map(|j| {
                let mut s = c(0.0, 0.0);
                for k in 0..m {
                    let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                    let v: C64 = r.iter().map(|rk| z - rk).product::<C64>() * g[n];
                    s += v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / m as f64);
                }
                s / m as f64
            })
            .collect();
        let norm = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = prod.iter().zip(&g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err / norm < 1e-6, "relative coefficient error {err}");
    }

    #[test]
    fn complement_of_unimodular_is_zero() {
        let p = LaurentPoly::from_terms(&[(1, c(1.0, 0.0))]).unwrap();
        let q = complement(&p).unwrap();
        assert!(q.l1_norm() < 1e-12);
    }

    #[test]
    fn complement_of_cosine_is_sine() {
        let p = LaurentPoly::from_terms(&[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))]).unwrap();
        let q = complement(&p).unwrap();
        assert_eq!(q.degree(), 1);
        assert_eq!(q.parity(), 1);
        for x in uniform_grid(200) {
            assert!((q.evaluate(x).norm() - (0.5 * x).sin().abs()).abs() < 1e-7);
        }
    }

    #[test]
    fn complement_random_degree_30() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_bounded(30, &mut rng);
        let q = complement(&p).unwrap();
        assert_eq!(q.parity(), p.parity());
        assert!(q.degree() <= p.degree());
        assert!(unit_circle_residual(&p, &q) < 1e-7);
    }

    #[test]
    fn complement_rejects_unbounded() {
        let p = LaurentPoly::constant(c(1.5, 0.0));
        assert!(matches!(complement(&p), Err(Error::Contract(_))));
    }
}
