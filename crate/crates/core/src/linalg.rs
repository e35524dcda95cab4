//! Dense complex linear algebra and state-vector primitives.
//!
//! Qubit 0 is always the most significant bit of a basis index, so an
//! ancilla prepended to a register occupies the top half / bottom half split
//! of every operator acting on it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Numeric tolerances used by the structural checks.
///
/// Every module reads the single [`TOL`] record so thresholds stay consistent.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub unitary: f64,
    pub hermitian: f64,
    pub density_trace: f64,
    pub density_psd: f64,
    pub spectrum: f64,
    pub state_norm: f64,
}

pub const TOL: Tolerances = Tolerances {
    unitary: 1e-10,
    hermitian: 1e-10,
    density_trace: 1e-10,
    density_psd: 1e-10,
    spectrum: 1e-8,
    state_norm: 1e-10,
};

/// Largest dimension handled by the dense simulator (12 qubits).
pub const MAX_DIM: usize = 4096;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Entrywise maximum modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    m.clone().singular_values().max()
}

/// Number of qubits for a power-of-two dimension.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::contract(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub fn unitary_residual(m: &ComplexMatrix) -> f64 {
    max_abs_diff(&(m.adjoint() * m), &identity(m.nrows()))
}

pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::contract(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub fn check_unitary(m: &ComplexMatrix) -> Result<()> {
    check_square(m)?;
    let r = unitary_residual(m);
    if r > TOL.unitary {
        return Err(Error::validation("unitarity ‖M†M − I‖_max", r, TOL.unitary));
    }
    Ok(())
}

pub fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    check_square(m)?;
    let r = hermitian_residual(m);
    if r > TOL.hermitian {
        return Err(Error::validation(
            "hermiticity ‖M − M†‖_max",
            r,
            TOL.hermitian,
        ));
    }
    Ok(())
}

/// Checks Hermiticity, unit trace and positive semidefiniteness.
pub fn check_density(m: &ComplexMatrix) -> Result<()> {
    check_hermitian(m)?;
    let tr = m.trace();
    let r = (tr - C64::new(1.0, 0.0)).norm();
    if r > TOL.density_trace {
        return Err(Error::validation("trace |tr ρ − 1|", r, TOL.density_trace));
    }
    let min = eig_hermitian(m)?
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, z| acc.min(z.re));
    if min < -TOL.density_psd {
        return Err(Error::validation(
            "positivity (negative eigenvalue)",
            -min,
            TOL.density_psd,
        ));
    }
    Ok(())
}

/// Eigenvalues with eigenvectors stored as the columns of a matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Arguments of the eigenvalues in (−π, π].
    pub fn phases(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.arg()).collect()
    }

    /// ‖VΛV† − M‖_max.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        let v = &self.eigenvectors;
        let lam = ComplexMatrix::from_diagonal(&DVector::from_vec(self.eigenvalues.clone()));
        max_abs_diff(&(v * lam * v.adjoint()), m)
    }

    pub fn eigenvector(&self, j: usize) -> DVector<C64> {
        self.eigenvectors.column(j).into_owned()
    }
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Spectrum> {
    check_hermitian(h)?;
    // Symmetrize so the solver sees an exactly Hermitian input.
    let hs = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(hs.clone());
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    // The solver occasionally stops with off-diagonal mass near 1e-8, so
    // the basis is re-orthonormalized and polished by Jacobi sweeps.
    let v = eig.eigenvectors.qr().q();
    let (vals, v) = jacobi_polish(v.adjoint() * &hs * &v, v);
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        vecs.set_column(k, &v.column(j));
    }
    Ok(Spectrum { eigenvalues: order.iter().map(|&j| c(vals[j], 0.0)).collect(), eigenvectors: vecs })
}

/// Cyclic complex Jacobi sweeps on a nearly diagonal Hermitian `a`,
/// accumulating the rotations into `v`. Returns the diagonal and `v`.
fn jacobi_polish(mut a: ComplexMatrix, mut v: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for _ in 0..10 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm())
            .fold(0.0, f64::max);
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let h = a[(p, q)];
                if h.norm() <= 1e-16 * scale {
                    continue;
                }
                let phase = C64::from_polar(1.0, -h.arg());
                let theta = 0.5 * (2.0 * h.norm()).atan2(a[(p, p)].re - a[(q, q)].re);
                let (cs, sn) = (theta.cos(), theta.sin());
                let j = [[c(cs, 0.0), c(-sn, 0.0)], [phase * sn, phase * cs]];
                for m in [&mut a, &mut v] {
                    for k in 0..n {
                        let (xp, xq) = (m[(k, p)], m[(k, q)]);
                        m[(k, p)] = xp * j[0][0] + xq * j[1][0];
                        m[(k, q)] = xp * j[0][1] + xq * j[1][1];
                    }
                }
                for k in 0..n {
                    let (xp, xq) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = j[0][0].conj() * xp + j[1][0].conj() * xq;
                    a[(q, k)] = j[0][1].conj() * xp + j[1][1].conj() * xq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Spectral decomposition of a unitary matrix.
///
/// Diagonalizes a Hermitian combination `a·(U+U†)/2 + b·(U−U†)/2i`, whose
/// eigenvectors also diagonalize `U` unless two distinct eigenphases project
/// onto nearly the same value; such clusters are re-diagonalized with another
/// direction.
pub fn eig_unitary(u: &ComplexMatrix) -> Result<Spectrum> {
    check_unitary(u)?;
    let (vals, vecs) = eig_normal(u, 0);
    let eigenvalues: Vec<C64> = vals.iter().map(|z| z / z.norm()).collect();
    let spec = Spectrum {
        eigenvalues,
        eigenvectors: vecs,
    };
    let r = spec.reconstruction_residual(u);
    if r > TOL.spectrum {
        return Err(Error::Conditioning {
            step: 0,
            detail: "unitary eigendecomposition".into(),
            residual: r,
        });
    }
    Ok(spec)
}

// Irrational-looking directions for the Hermitian projection, tried in turn.
const DIRECTIONS: [f64; 4] = [0.412_897_3, 1.923_811_7, 2.718_281_8, 0.057_721_5];

fn eig_normal(u: &ComplexMatrix, depth: usize) -> (Vec<C64>, ComplexMatrix) {
    let n = u.nrows();
    if n == 1 {
        return (vec![u[(0, 0)]], identity(1));
    }
    let angle = DIRECTIONS[depth % DIRECTIONS.len()];
    let (a, b) = (angle.cos(), angle.sin());
    let ud = u.adjoint();
    let herm = (u + &ud).scale(0.5 * a) + (u - &ud) * c(0.0, -0.5 * b);
    let herm = (&herm + herm.adjoint()).scale(0.5);
    let v0 = SymmetricEigen::new(herm.clone()).eigenvectors.qr().q();
    let (w0, v0) = jacobi_polish(v0.adjoint() * &herm * &v0, v0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w0[i].total_cmp(&w0[j]));
    let mut v = ComplexMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        v.set_column(k, &v0.column(j));
    }
    let w: Vec<f64> = order.iter().map(|&j| w0[j]).collect();
    let mut b_mat = v.adjoint() * u * &v;

    if depth < 8 {
        // Clusters of nearly equal projected values may still mix eigenvectors.
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && w[end] - w[end - 1] < 1e-6 {
                end += 1;
            }
            if end - start > 1 {
                let size = end - start;
                let block = b_mat.view((start, start), (size, size)).into_owned();
                let mut off = 0.0f64;
                for i in 0..size {
                    for j in 0..size {
                        if i != j {
                            off = off.max(block[(i, j)].norm());
                        }
                    }
                }
                if off > 1e-12 {
                    let (_, sub_v) = eig_normal(&block, depth + 1);
                    let cols = v.columns(start, size) * &sub_v;
                    v.columns_mut(start, size).copy_from(&cols);
                }
            }
            start = end;
        }
        b_mat = v.adjoint() * u * &v;
    }
    let vals = (0..n).map(|i| b_mat[(i, i)]).collect();
    (vals, v)
}

/// Block matrix adding one control qubit in front of `u`.
///
/// With `control_on_zero` the result is `[[U, 0], [0, I]]`; otherwise
/// `[[I, 0], [0, U]]`.
pub fn controlled(u: &ComplexMatrix, control_on_zero: bool) -> Result<ComplexMatrix> {
    check_square(u)?;
    qubit_count(u.nrows())?;
    let n = u.nrows();
    let mut out = identity(2 * n);
    let off = if control_on_zero { 0 } else { n };
    out.view_mut((off, off), (n, n)).copy_from(u);
    Ok(out)
}

/// `u^d` by repeated squaring.
pub fn matrix_power(u: &ComplexMatrix, mut d: u64) -> ComplexMatrix {
    let mut result = identity(u.nrows());
    let mut base = u.clone();
    while d > 0 {
        if d & 1 == 1 {
            result = &result * &base;
        }
        d >>= 1;
        if d > 0 {
            base = &base * &base;
        }
    }
    result
}

/// 2x2 single-qubit gates used throughout.
pub mod gates {
    use super::{c, ComplexMatrix, C64};

    pub fn rz(x: f64) -> ComplexMatrix {
        let h = 0.5 * x;
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::from_polar(1.0, -h), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, h)],
        )
    }

    pub fn ry(theta: f64) -> ComplexMatrix {
        let (s, co) = (0.5 * theta).sin_cos();
        ComplexMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
    }

    pub fn hadamard() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }
}

/// `2|0…0⟩⟨0…0| − I` on `qubits` qubits.
pub fn zero_reflector(qubits: usize) -> ComplexMatrix {
    let dim = 1usize << qubits;
    let mut r = -identity(dim);
    r[(0, 0)] = c(1.0, 0.0);
    r
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        qubit_count(amplitudes.len())?;
        let r = (amplitudes.norm_squared() - 1.0).abs();
        if r > TOL.state_norm {
            return Err(Error::validation("state norm |‖ψ‖² − 1|", r, TOL.state_norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes the input; fails on a (numerically) zero vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let n = amplitudes.norm();
        if n < 1e-12 {
            return Err(Error::Conditioning {
                step: 0,
                detail: "state norm vanished".into(),
                residual: n,
            });
        }
        qubit_count(amplitudes.len())?;
        Ok(Self {
            amplitudes: amplitudes.unscale(n),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        let mut v = DVector::zeros(dim);
        if index >= dim {
            return Err(Error::contract(format!("basis index {index} out of range {dim}")));
        }
        v[index] = c(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    /// `|0⟩ ⊗ self` (new qubit in front).
    pub fn with_zero_ancilla(&self) -> StateVector {
        let mut v = DVector::zeros(2 * self.dim());
        v.rows_mut(0, self.dim()).copy_from(&self.amplitudes);
        StateVector { amplitudes: v }
    }

    /// Probability of reading 1 on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        let n = self.qubits();
        if qubit >= n {
            return Err(Error::contract(format!("qubit {qubit} out of range for {n} qubits")));
        }
        let mask = 1usize << (n - 1 - qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    /// Projects `qubit` onto `outcome` and renormalizes.
    pub fn collapse(&self, qubit: usize, outcome: u8) -> Result<StateVector> {
        let n = self.qubits();
        if qubit >= n {
            return Err(Error::contract(format!("qubit {qubit} out of range for {n} qubits")));
        }
        let mask = 1usize << (n - 1 - qubit);
        let mut v = self.amplitudes.clone();
        for (i, z) in v.iter_mut().enumerate() {
            if ((i & mask != 0) as u8) != outcome {
                *z = c(0.0, 0.0);
            }
        }
        StateVector::normalized(v)
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Measures one qubit with Born probabilities and returns the collapsed state.
pub fn sample_measurement<R: Rng + ?Sized>(
    state: &StateVector,
    qubit: usize,
    rng: &mut R,
) -> Result<(u8, StateVector)> {
    let p1 = state.probability_one(qubit)?;
    let outcome = u8::from(rng.gen::<f64>() < p1);
    Ok((outcome, state.collapse(qubit, outcome)?))
}

/// Seeded convenience wrapper around [`sample_measurement`].
pub fn sample_measurement_seeded(
    state: &StateVector,
    qubit: usize,
    seed: u64,
) -> Result<(u8, StateVector)> {
    sample_measurement(state, qubit, &mut rng_from_seed(seed))
}

/// Partial trace over the trailing `traced` qubits.
pub fn partial_trace_tail(m: &ComplexMatrix, traced: usize) -> ComplexMatrix {
    let k = 1usize << traced;
    let keep = m.nrows() / k;
    let mut out = ComplexMatrix::zeros(keep, keep);
    for i in 0..keep {
        for j in 0..keep {
            let mut s = c(0.0, 0.0);
            for t in 0..k {
                s += m[(i * k + t, j * k + t)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(h)?;
    let v = &spec.eigenvectors;
    let d: Vec<C64> = spec.eigenvalues.iter().map(|z| f(z.re)).collect();
    Ok(v * ComplexMatrix::from_diagonal(&DVector::from_vec(d)) * v.adjoint())
}

/// Applies `f` to the eigenphases of a unitary matrix.
pub fn unitary_function(u: &ComplexMatrix, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
    let spec = eig_unitary(u)?;
    let v = &spec.eigenvectors;
    let d: Vec<C64> = spec.phases().iter().map(|&t| f(t)).collect();
    Ok(v * ComplexMatrix::from_diagonal(&DVector::from_vec(d)) * v.adjoint())
}
