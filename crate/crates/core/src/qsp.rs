//! Single-qubit trigonometric quantum signal processing.
//!
//! `W(x) = Rz(ω) Ry(θ₀) Rz(φ₀) · Π_{l=1..L} Rz(x) Ry(θ_l) Rz(φ_l)` realizes
//! `[[P, −Q], [Q*, P*]]` for Laurent polynomials `P`, `Q` in `e^{ix/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{complement, sqrt_nonnegative, unit_circle_residual, verification_grid, LaurentPoly};
use crate::linalg::{c, ComplexMatrix, C64};

/// Rotation angles of a QSP sequence with `L = thetas.len() − 1` signal layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub omega: f64,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl AngleSet {
    pub fn new(omega: f64, thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() != phis.len() || thetas.is_empty() {
            return Err(Error::contract(format!(
                "thetas ({}) and phis ({}) must have the same nonzero length",
                thetas.len(),
                phis.len()
            )));
        }
        Ok(Self { omega, thetas, phis })
    }

    pub fn layers(&self) -> usize {
        self.thetas.len() - 1
    }
}

/// Minimal 2x2 complex matrix used on the hot paths.
pub(crate) type M2 = [[C64; 2]; 2];

pub(crate) fn m2_mul(a: &M2, b: &M2) -> M2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub(crate) fn rz2(x: f64) -> M2 {
    let z = c(0.0, 0.0);
    [[C64::from_polar(1.0, -0.5 * x), z], [z, C64::from_polar(1.0, 0.5 * x)]]
}

pub(crate) fn ry2(theta: f64) -> M2 {
    let (s, co) = (0.5 * theta).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

/// `Ry(θ) Rz(φ)` as one matrix.
pub(crate) fn ry_rz(theta: f64, phi: f64) -> M2 {
    m2_mul(&ry2(theta), &rz2(phi))
}

pub(crate) fn qsp_m2(a: &AngleSet, x: f64) -> M2 {
    let mut w = m2_mul(&rz2(a.omega), &ry_rz(a.thetas[0], a.phis[0]));
    let signal = rz2(x);
    for l in 1..=a.layers() {
        w = m2_mul(&w, &signal);
        w = m2_mul(&w, &ry_rz(a.thetas[l], a.phis[l]));
    }
    w
}

/// The 2x2 QSP matrix `W(x)`.
pub fn qsp_unitary(a: &AngleSet, x: f64) -> ComplexMatrix {
    let w = qsp_m2(a, x);
    ComplexMatrix::from_row_slice(2, 2, &[w[0][0], w[0][1], w[1][0], w[1][1]])
}

/// Largest entrywise deviation of `W(x)` from `[[P, −Q], [Q*, P*]]` on the
/// verification grid.
pub fn round_trip_error(a: &AngleSet, p: &LaurentPoly, q: &LaurentPoly) -> f64 {
    verification_grid(a.layers())
        .map(|x| {
            let w = qsp_m2(a, x);
            let (pv, qv) = (p.evaluate(x), q.evaluate(x));
            (w[0][0] - pv)
                .norm()
                .max((w[0][1] + qv).norm())
                .max((w[1][0] - qv.conj()).norm())
                .max((w[1][1] - pv.conj()).norm())
        })
        .fold(0.0, f64::max)
}

/// `max_x |⟨0|W(x)|0⟩ − F(x)|` on the verification grid.
pub fn projection_error(a: &AngleSet, f: &LaurentPoly) -> f64 {
    verification_grid(a.layers())
        .map(|x| (qsp_m2(a, x)[0][0] - f.evaluate(x)).norm())
        .fold(0.0, f64::max)
}

/// `max_x |⟨0|W†ZW|0⟩ − F(x)|` on the verification grid.
pub fn expectation_error(a: &AngleSet, f: &LaurentPoly) -> f64 {
    verification_grid(a.layers())
        .map(|x| {
            let w = qsp_m2(a, x);
            (w[0][0].norm_sqr() - w[1][0].norm_sqr() - f.evaluate(x).re).abs()
        })
        .fold(0.0, f64::max)
}

/// Precondition tolerance on `|P|² + |Q|² = 1`.
pub const UNIT_TOL: f64 = 1e-7;

/// Angles reproducing `[[P, −Q], [Q*, P*]]`, found by stripping one signal
/// layer at a time from the right.
pub fn find_angles(p: &LaurentPoly, q: &LaurentPoly) -> Result<AngleSet> {
    let r = unit_circle_residual(p, q);
    if r > UNIT_TOL {
        return Err(Error::contract(format!(
            "|P|² + |Q|² deviates from 1 by {r:.3e} on the grid"
        )));
    }
    strip_layers(p, q)
}

/// Layer stripping without the unit-circle precondition check.
pub(crate) fn strip_layers(p: &LaurentPoly, q: &LaurentPoly) -> Result<AngleSet> {
    let l = p.degree().max(q.degree());
    let parity = (l % 2) as u8;
    for (name, poly) in [("P", p), ("Q", q)] {
        if poly.parity() != parity && poly.l1_norm() > 0.0 {
            return Err(Error::contract(format!(
                "{name} has parity {} but the layer count {l} needs parity {parity}",
                poly.parity()
            )));
        }
    }
    // Dense arrays over j ∈ [−L, L], offset by L.
    let off = l as i64;
    let mut pc: Vec<C64> = (-off..=off).map(|j| p.coeff(j)).collect();
    let mut qc: Vec<C64> = (-off..=off).map(|j| q.coeff(j)).collect();
    let at = |v: &Vec<C64>, j: i64| -> C64 {
        if j.abs() > off {
            c(0.0, 0.0)
        } else {
            v[(j + off) as usize]
        }
    };
    let mut thetas = vec![0.0; l + 1];
    let mut phis = vec![0.0; l + 1];
    let zero = c(0.0, 0.0);

    for k in (1..=l).rev() {
        let ki = k as i64;
        let (p_hi, q_hi) = (at(&pc, ki), at(&qc, ki));
        let (p_lo, q_lo) = (at(&pc, -ki), at(&qc, -ki));
        let top = p_hi.norm_sqr() + q_hi.norm_sqr();
        let bottom = p_lo.norm_sqr() + q_lo.norm_sqr();
        let (theta, phi) = if top.max(bottom) < 1e-24 {
            (0.0, 0.0)
        } else if top >= bottom {
            // cos(θ/2) e^{iφ/2} p_k + sin(θ/2) e^{−iφ/2} q_k = 0
            let phi = if p_hi.norm() == 0.0 || q_hi.norm() == 0.0 {
                0.0
            } else {
                (-q_hi).arg() - p_hi.arg()
            };
            (2.0 * p_hi.norm().atan2(q_hi.norm()), phi)
        } else {
            // cos(θ/2) e^{−iφ/2} q_{−k} − sin(θ/2) e^{iφ/2} p_{−k} = 0
            let phi = if p_lo.norm() == 0.0 || q_lo.norm() == 0.0 {
                0.0
            } else {
                q_lo.arg() - p_lo.arg()
            };
            (2.0 * q_lo.norm().atan2(p_lo.norm()), phi)
        };
        thetas[k] = theta;
        phis[k] = phi;

        let (s, co) = (0.5 * theta).sin_cos();
        let ep = C64::from_polar(co, 0.5 * phi);
        let em = C64::from_polar(s, -0.5 * phi);
        let ep_s = C64::from_polar(s, 0.5 * phi);
        let em_c = C64::from_polar(co, -0.5 * phi);
        // Residues that the chosen angles must annihilate.
        let lost_p = ep * p_hi + em * q_hi;
        let lost_q = em_c * q_lo - ep_s * p_lo;
        let mut np = vec![zero; pc.len()];
        let mut nq = vec![zero; qc.len()];
        for j in -(ki - 1)..=(ki - 1) {
            let idx = (j + off) as usize;
            np[idx] = ep * at(&pc, j - 1) + em * at(&qc, j - 1);
            nq[idx] = em_c * at(&qc, j + 1) - ep_s * at(&pc, j + 1);
        }
        let residual = lost_p.norm().max(lost_q.norm());
        if residual > 1e-6 {
            return Err(Error::Conditioning {
                step: k,
                detail: "leading coefficients could not both be annihilated".into(),
                residual,
            });
        }
        pc = np;
        qc = nq;
    }

    let (p0, q0) = (at(&pc, 0), at(&qc, 0));
    let (omega, theta0, phi0) = if q0.norm() < 1e-12 {
        (-2.0 * p0.arg(), 0.0, 0.0)
    } else if p0.norm() < 1e-12 {
        (-2.0 * q0.arg(), std::f64::consts::PI, 0.0)
    } else {
        (
            -(p0.arg() + q0.arg()),
            2.0 * q0.norm().atan2(p0.norm()),
            q0.arg() - p0.arg(),
        )
    };
    thetas[0] = theta0;
    phis[0] = phi0;
    AngleSet::new(omega, thetas, phis)
}

fn check_grid_bound(f: &LaurentPoly, what: &str) -> Result<()> {
    let max = f.grid_max_abs(4 * (f.degree() + 1) + 1);
    if max > 1.0 + 1e-9 {
        return Err(Error::contract(format!("{what}: |F| reaches {max:.12} > 1")));
    }
    Ok(())
}

/// Angles with `⟨0|W(x)|0⟩ = F(x)` for a parity-0 `F`; the sequence has
/// as many layers as the half-index degree of `F`.
pub fn angles_for_projection(f: &LaurentPoly) -> Result<AngleSet> {
    if f.parity() != 0 {
        return Err(Error::contract("projection target must have parity 0"));
    }
    check_grid_bound(f, "projection target")?;
    let f = f.trimmed(0.0);
    let f = if f.degree() % 2 == 1 { f.padded(f.degree() + 1) } else { f };
    let q = complement(&f)?;
    strip_layers(&f, &q)
}

/// Angles with `⟨0|W†ZW|0⟩ = F(x)` for a real-valued parity-0 `F`, using
/// `P = √((1+F)/2)` and `Q = √((1−F)/2)`; the sequence has `deg_{e^{ix}} F` layers.
pub fn angles_for_expectation(f: &LaurentPoly) -> Result<AngleSet> {
    if f.parity() != 0 {
        return Err(Error::contract("expectation target must have parity 0"));
    }
    let sym = f.real_symmetry_residual();
    if sym > 1e-10 {
        return Err(Error::contract(format!(
            "expectation target is not real-valued (symmetry residual {sym:.3e})"
        )));
    }
    check_grid_bound(f, "expectation target")?;
    let l = f.degree() / 2;
    let half = c(0.5, 0.0);
    let one = LaurentPoly::constant(c(1.0, 0.0));
    let plus = one.add(&f)?.scale(half);
    let minus = one.sub(&f)?.scale(half);
    let p = sqrt_nonnegative(&plus, l)?;
    let q = sqrt_nonnegative(&minus, l)?;
    strip_layers(&p, &q)
}
