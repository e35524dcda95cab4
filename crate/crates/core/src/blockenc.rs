//! Block encodings, qubitization and the purified density-matrix encoding.
//!
//! Ancilla registers are always the most significant qubits, so the encoded
//! block is the top-left `2^n × 2^n` corner of the unitary.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    c, check_density, check_hermitian, check_unitary, eig_hermitian, eig_unitary,
    hermitian_residual, identity, kron, qubit_count, spectral_norm, zero_reflector, ComplexMatrix,
    C64,
};

/// Tolerance on `‖A‖ ≤ 1` for an encoded block.
pub const BLOCK_NORM_TOL: f64 = 1e-8;

/// A unitary on `m + n` qubits whose flagged block is `A = H/Λ`.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    unitary: ComplexMatrix,
    ancillas: usize,
    scale: f64,
    system_qubits: usize,
}

impl BlockEncoding {
    pub fn new(unitary: ComplexMatrix, ancillas: usize, scale: f64) -> Result<Self> {
        check_unitary(&unitary)?;
        let total = qubit_count(unitary.nrows())?;
        if ancillas > total {
            return Err(Error::contract(format!(
                "{ancillas} ancillas on a {total}-qubit unitary"
            )));
        }
        if !(scale >= 1.0) {
            return Err(Error::contract(format!("scale {scale} must be at least 1")));
        }
        let be = Self { unitary, ancillas, scale, system_qubits: total - ancillas };
        let norm = spectral_norm(&be.block());
        if norm > 1.0 + BLOCK_NORM_TOL {
            return Err(Error::validation("encoded block norm ≤ 1", norm - 1.0, BLOCK_NORM_TOL));
        }
        Ok(be)
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn ancillas(&self) -> usize {
        self.ancillas
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn system_qubits(&self) -> usize {
        self.system_qubits
    }

    /// `(⟨0^m| ⊗ I) U (|0^m⟩ ⊗ I)`.
    pub fn block(&self) -> ComplexMatrix {
        let n = 1usize << self.system_qubits;
        self.unitary.view((0, 0), (n, n)).into_owned()
    }
}

/// Exact one-ancilla encoding of `H/Λ` through the dilation
/// `[[A, √(I−A²)], [√(I−A²), −A]]`.
pub fn encode_hermitian(h: &ComplexMatrix, lambda: f64) -> Result<BlockEncoding> {
    check_hermitian(h)?;
    let norm = spectral_norm(h);
    if norm > lambda * (1.0 + 1e-12) {
        return Err(Error::contract(format!("‖H‖ = {norm} exceeds the scale {lambda}")));
    }
    let a = h.scale(1.0 / lambda);
    let a = (&a + a.adjoint()).scale(0.5);
    let spec = eig_hermitian(&a)?;
    let v = &spec.eigenvectors;
    let roots: Vec<C64> = spec
        .eigenvalues
        .iter()
        .map(|l| c((1.0 - l.re * l.re).clamp(0.0, 1.0).sqrt(), 0.0))
        .collect();
    let s = v * ComplexMatrix::from_diagonal(&DVector::from_vec(roots)) * v.adjoint();
    let n = a.nrows();
    let mut u = ComplexMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&a);
    u.view_mut((0, n), (n, n)).copy_from(&s);
    u.view_mut((n, 0), (n, n)).copy_from(&s);
    u.view_mut((n, n), (n, n)).copy_from(&(-&a));
    BlockEncoding::new(u, 1, lambda.max(1.0))
}

/// A block encoding whose flagged subspace is preserved by `Û = (REFLECTOR ⊗ I)·Ũ`.
#[derive(Debug, Clone)]
pub struct QubitizedEncoding {
    base: BlockEncoding,
    /// `Ũ` before the reflector; its square is the identity on flagged states.
    pre_reflector: ComplexMatrix,
    unitary: ComplexMatrix,
    flags: usize,
}

impl QubitizedEncoding {
    fn from_pre_reflector(
        base: BlockEncoding,
        pre_reflector: ComplexMatrix,
        flags: usize,
    ) -> Self {
        let sys = 1usize << base.system_qubits;
        let refl = kron(&zero_reflector(flags), &identity(sys));
        let unitary = refl * &pre_reflector;
        Self { base, pre_reflector, unitary, flags }
    }

    pub fn base(&self) -> &BlockEncoding {
        &self.base
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn pre_reflector(&self) -> &ComplexMatrix {
        &self.pre_reflector
    }

    /// Number of flag qubits that must read zero.
    pub fn flag_qubits(&self) -> usize {
        self.flags
    }

    pub fn system_qubits(&self) -> usize {
        self.base.system_qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.flags + self.base.system_qubits
    }

    pub fn scale(&self) -> f64 {
        self.base.scale
    }

    /// The flagged block of `Û`.
    pub fn block(&self) -> ComplexMatrix {
        let n = 1usize << self.base.system_qubits;
        self.unitary.view((0, 0), (n, n)).into_owned()
    }

    /// `|0^flags⟩ ⊗ v`.
    pub fn lift(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.unitary.nrows());
        out.rows_mut(0, v.len()).copy_from(v);
        out
    }
}

/// Qubitization of a block encoding with a Hermitian block.
pub fn qubitize(be: &BlockEncoding) -> Result<QubitizedEncoding> {
    let block = be.block();
    let r = hermitian_residual(&block);
    if r > 1e-8 {
        return Err(Error::contract(format!(
            "qubitization needs a Hermitian block (residual {r:.3e})"
        )));
    }
    let inner = be.unitary.nrows();
    let u = &be.unitary;
    let u_dag = u.adjoint();
    // Ũ = (HX)_q · (|0⟩⟨0| ⊗ U + |1⟩⟨1| ⊗ U†) · H_q
    //   = ½ [[U + U†, U − U†], [U† − U, −(U + U†)]].
    let plus = (u + &u_dag).scale(0.5);
    let minus = (u - &u_dag).scale(0.5);
    let mut tilde = ComplexMatrix::zeros(2 * inner, 2 * inner);
    tilde.view_mut((0, 0), (inner, inner)).copy_from(&plus);
    tilde.view_mut((0, inner), (inner, inner)).copy_from(&minus);
    tilde.view_mut((inner, 0), (inner, inner)).copy_from(&(-&minus));
    tilde.view_mut((inner, inner), (inner, inner)).copy_from(&(-&plus));
    let base = be.clone();
    Ok(QubitizedEncoding::from_pre_reflector(base, tilde, be.ancillas + 1))
}

/// Unitary on `2n` qubits (registers `A`, `B`) whose first column is the
/// purification `Σ_j √p_j |ψ_j⟩_A |j⟩_B` of `ρ`, with `p_0 ≥ p_1 ≥ …`.
pub fn purified_oracle(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_density(rho)?;
    let n = rho.nrows();
    let spec = eig_hermitian(rho)?;
    let dim = n * n;
    let mut first = DVector::<C64>::zeros(dim);
    // Label B by descending eigenvalue, so a pure |ψ⟩ purifies to |ψ⟩|0⟩.
    for (b, j) in (0..n).rev().enumerate() {
        let p = spec.eigenvalues[j].re.max(0.0);
        let psi = spec.eigenvector(j);
        for a in 0..n {
            first[a * n + b] += psi[a] * p.sqrt();
        }
    }
    let norm = first.norm();
    first /= c(norm, 0.0);
    let mut cols: Vec<DVector<C64>> = vec![first];
    // Modified Gram–Schmidt over the standard basis, in index order.
    for k in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut v = DVector::<C64>::zeros(dim);
        v[k] = c(1.0, 0.0);
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let r = v.norm();
        if r > 1e-8 {
            cols.push(v / c(r, 0.0));
        }
    }
    Ok(ComplexMatrix::from_columns(&cols))
}

/// Swap of two `n`-dimensional registers inside `[A, B, S]`, exchanging `A` and `S`.
fn swap_a_s(n: usize) -> ComplexMatrix {
    let dim = n * n * n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for a in 0..n {
        for b in 0..n {
            for s in 0..n {
                out[((s * n + b) * n + a, (a * n + b) * n + s)] = c(1.0, 0.0);
            }
        }
    }
    out
}

/// Qubitized encoding of `ρ` built from its purified oracle, with `2n` flag qubits.
pub fn density_block_encoding(u_rho: &ComplexMatrix) -> Result<QubitizedEncoding> {
    check_unitary(u_rho)?;
    let q2 = qubit_count(u_rho.nrows())?;
    if q2 % 2 != 0 {
        return Err(Error::contract("purified oracle must act on an even number of qubits"));
    }
    let n = 1usize << (q2 / 2);
    let id = identity(n);
    let lifted = kron(u_rho, &id);
    let tilde = lifted.adjoint() * swap_a_s(n) * &lifted;
    let base = BlockEncoding::new(tilde.clone(), q2, 1.0)?;
    Ok(QubitizedEncoding::from_pre_reflector(base, tilde, q2))
}

/// Below this, the image of a flagged state adds no new direction and the
/// `±arccos λ` pair counts as one phase. Rank-deficient encodings carry
/// round-off near 1e-7 in these directions.
pub const FLAG_COLLAPSE: f64 = 1e-6;

/// Eigenphases of `Û` restricted to the span of flagged states and their images.
pub fn flagged_eigenphases(q: &QubitizedEncoding) -> Result<Vec<f64>> {
    let n = 1usize << q.system_qubits();
    let u = &q.unitary;
    let dim = u.nrows();
    let mut cands: Vec<DVector<C64>> = Vec::with_capacity(2 * n);
    for k in 0..n {
        let mut e = DVector::<C64>::zeros(dim);
        e[k] = c(1.0, 0.0);
        cands.push(e);
    }
    for k in 0..n {
        cands.push(u.column(k).into_owned());
    }
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for mut v in cands {
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let r = v.norm();
        if r > FLAG_COLLAPSE {
            basis.push(v / c(r, 0.0));
        }
    }
    let b = ComplexMatrix::from_columns(&basis);
    let m = b.adjoint() * u * &b;
    let spec = eig_unitary(&m)?;
    Ok(spec.phases())
}

/// The phase multiset `{±arccos λ}` for block eigenvalues `λ`; a pair
/// collapses to one phase when `√(1−λ²)` falls below [`FLAG_COLLAPSE`].
pub fn expected_flagged_phases(eigenvalues: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for &l in eigenvalues {
        let l = l.clamp(-1.0, 1.0);
        let t = l.acos();
        out.push(t);
        if (1.0 - l * l).max(0.0).sqrt() > FLAG_COLLAPSE {
            out.push(-t);
        }
    }
    out
}

/// Largest distance on the circle after greedily matching two phase multisets.
///
/// Returns infinity if the sizes differ.
pub fn phase_multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let circ = |x: f64, y: f64| {
        let d = (x - y).rem_euclid(2.0 * std::f64::consts::PI);
        d.min(2.0 * std::f64::consts::PI - d)
    };
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[i].total_cmp(&a[j]));
    for i in order {
        let (mut best, mut idx) = (f64::INFINITY, 0);
        for (j, &y) in b.iter().enumerate() {
            if !used[j] && circ(a[i], y) < best {
                best = circ(a[i], y);
                idx = j;
            }
        }
        used[idx] = true;
        worst = worst.max(best);
    }
    worst
}
