//! Quantum phase processing circuits.
//!
//! `V(U) = A₀ · Π_{l=1..L} C_l (Ry(θ_l) Rz(φ_l) ⊗ I)` with `A₀ = Rz(ω) Ry(θ₀) Rz(φ₀)`.
//! Odd layers apply `U†` controlled on the ancilla being `|0⟩`, even layers
//! apply `U` controlled on `|1⟩`. The ancilla is qubit 0 (most significant), so
//! a state splits into halves `(ψ₀, ψ₁)` and the circuit acts on `2×2` blocks.

use rand::Rng;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{
    c, check_density, check_unitary, eig_unitary, qubit_count, rng_from_seed, ComplexMatrix,
    StateVector, C64,
};
use crate::qsp::{angles_for_expectation, angles_for_projection, qsp_m2, ry_rz, rz2, AngleSet, M2};

/// A phase processor bound to a target unitary.
#[derive(Debug, Clone)]
pub struct QppCircuit {
    angles: AngleSet,
    u: ComplexMatrix,
    u_dag: ComplexMatrix,
    qubits: usize,
}

/// Number of ancilla qubits every phase processor uses.
pub const ANCILLA_QUBITS: usize = 1;

impl QppCircuit {
    pub fn build(angles: AngleSet, u: ComplexMatrix) -> Result<Self> {
        check_unitary(&u)?;
        let qubits = qubit_count(u.nrows())?;
        let u_dag = u.adjoint();
        Ok(Self { angles, u, u_dag, qubits })
    }

    pub fn angles(&self) -> &AngleSet {
        &self.angles
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn layers(&self) -> usize {
        self.angles.layers()
    }

    /// System qubits acted on by `U`.
    pub fn system_qubits(&self) -> usize {
        self.qubits
    }

    /// Total width: one ancilla plus the system.
    pub fn total_qubits(&self) -> usize {
        self.qubits + ANCILLA_QUBITS
    }

    /// Number of controlled-`U` or controlled-`U†` applications.
    pub fn query_count(&self) -> usize {
        self.layers()
    }

    /// The full `2^{n+1}` unitary.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.u.nrows();
        let id = ComplexMatrix::identity(n, n);
        let (b0, b1) = self.apply_halves(id.clone(), ComplexMatrix::zeros(n, n));
        let (d0, d1) = self.apply_halves(ComplexMatrix::zeros(n, n), id);
        let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&b0);
        out.view_mut((n, 0), (n, n)).copy_from(&b1);
        out.view_mut((0, n), (n, n)).copy_from(&d0);
        out.view_mut((n, n), (n, n)).copy_from(&d1);
        out
    }

    /// Applies `V` to a state given as ancilla halves `(ψ₀, ψ₁)`.
    ///
    /// The halves may have several columns; `U` acts on their rows, so a
    /// register that `U` does not touch can ride along as extra columns.
    pub fn apply_halves(
        &self,
        h0: ComplexMatrix,
        h1: ComplexMatrix,
    ) -> (ComplexMatrix, ComplexMatrix) {
        stream(&self.angles, &self.u, &self.u_dag, h0, h1)
    }

    /// `V |ψ⟩` for a full `2^{n+1}` state.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let n = self.u.nrows();
        if state.dim() != 2 * n {
            return Err(Error::contract(format!(
                "state dimension {} does not match circuit width {}",
                state.dim(),
                2 * n
            )));
        }
        let a = state.amplitudes();
        let h0 = ComplexMatrix::from_iterator(n, 1, a.rows(0, n).iter().copied());
        let h1 = ComplexMatrix::from_iterator(n, 1, a.rows(n, n).iter().copied());
        let (o0, o1) = self.apply_halves(h0, h1);
        let v = nalgebra::DVector::from_iterator(2 * n, o0.iter().chain(o1.iter()).copied());
        StateVector::new(v)
    }
}

fn mix(g: &M2, h0: &ComplexMatrix, h1: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    (h0 * g[0][0] + h1 * g[0][1], h0 * g[1][0] + h1 * g[1][1])
}

/// Applies the layer product right to left, then `A₀`.
pub(crate) fn stream(
    a: &AngleSet,
    u: &ComplexMatrix,
    u_dag: &ComplexMatrix,
    mut h0: ComplexMatrix,
    mut h1: ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix) {
    for l in (1..=a.layers()).rev() {
        (h0, h1) = mix(&ry_rz(a.thetas[l], a.phis[l]), &h0, &h1);
        if l % 2 == 1 {
            h0 = u_dag * h0;
        } else {
            h1 = u * h1;
        }
    }
    let a0 = crate::qsp::m2_mul(&rz2(a.omega), &ry_rz(a.thetas[0], a.phis[0]));
    mix(&a0, &h0, &h1)
}

/// `V(U)` for the given angles.
pub fn build(angles: AngleSet, u: ComplexMatrix) -> Result<QppCircuit> {
    QppCircuit::build(angles, u)
}

/// The 2x2 block `V` induces on `{|0,χ⟩, |1,χ⟩}` for an eigenphase `τ`.
pub fn eigenspace_block(a: &AngleSet, tau: f64) -> M2 {
    let w = qsp_m2(a, tau);
    if a.layers() % 2 == 1 {
        let ph = C64::from_polar(1.0, -0.5 * tau);
        [[w[0][0] * ph, w[0][1] * ph], [w[1][0] * ph, w[1][1] * ph]]
    } else {
        w
    }
}

/// Largest deviation of `V(U)`, written in the eigenbasis of `U`, from the
/// direct sum of the per-eigenphase 2x2 blocks.
pub fn verify_eigenspace(circ: &QppCircuit) -> Result<f64> {
    let spec = eig_unitary(&circ.u)?;
    let n = circ.u.nrows();
    let x = &spec.eigenvectors;
    let v = circ.matrix();
    // (I₂ ⊗ X)† V (I₂ ⊗ X), one block at a time.
    let mut t = ComplexMatrix::zeros(2 * n, 2 * n);
    for r in 0..2 {
        for s in 0..2 {
            let blk = v.view((r * n, s * n), (n, n));
            let tb = x.adjoint() * blk * x;
            t.view_mut((r * n, s * n), (n, n)).copy_from(&tb);
        }
    }
    let phases = spec.phases();
    let mut worst: f64 = 0.0;
    for i in 0..2 * n {
        for j in 0..2 * n {
            let (ri, ci) = (i / n, i % n);
            let (rj, cj) = (j / n, j % n);
            let expected = if ci == cj {
                eigenspace_block(&circ.angles, phases[ci])[ri][rj]
            } else {
                c(0.0, 0.0)
            };
            worst = worst.max((t[(i, j)] - expected).norm());
        }
    }
    Ok(worst)
}

/// `F(U) = Σ_j F(τ_j)|χ_j⟩⟨χ_j|`, read off the top-left block of a phase processor.
pub fn phase_evolve(f: &LaurentPoly, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let angles = angles_for_projection(f)?;
    let circ = QppCircuit::build(angles, u.clone())?;
    let n = u.nrows();
    let (b0, _) = circ.apply_halves(ComplexMatrix::identity(n, n), ComplexMatrix::zeros(n, n));
    Ok(b0)
}

/// Phase processor whose ancilla `⟨Z⟩` on input `|0⟩⟨0| ⊗ ρ` is `Σ_j p_j F(τ_j)`.
#[derive(Debug, Clone)]
pub struct PhaseEvaluator {
    circuit: QppCircuit,
    /// `V₀₀†V₀₀ − V₁₀†V₁₀`, the observable seen by the system register.
    observable: ComplexMatrix,
    /// `V₁₀†V₁₀`, whose expectation is the probability of reading 1.
    excited: ComplexMatrix,
}

impl PhaseEvaluator {
    pub fn new(f: &LaurentPoly, u: &ComplexMatrix) -> Result<Self> {
        let angles = angles_for_expectation(f)?;
        Self::from_angles(angles, u)
    }

    pub fn from_angles(angles: AngleSet, u: &ComplexMatrix) -> Result<Self> {
        let circuit = QppCircuit::build(angles, u.clone())?;
        let n = u.nrows();
        let (b0, b1) =
            circuit.apply_halves(ComplexMatrix::identity(n, n), ComplexMatrix::zeros(n, n));
        let excited = b1.adjoint() * &b1;
        let observable = b0.adjoint() * &b0 - &excited;
        Ok(Self { circuit, observable, excited })
    }

    pub fn circuit(&self) -> &QppCircuit {
        &self.circuit
    }

    /// Exact `tr[(Z ⊗ I) V (|0⟩⟨0| ⊗ ρ) V†]`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> Result<f64> {
        self.check_rho(rho)?;
        Ok((rho * &self.observable).trace().re)
    }

    /// Probability that the ancilla reads 1.
    pub fn probability_one(&self, rho: &ComplexMatrix) -> Result<f64> {
        self.check_rho(rho)?;
        Ok((rho * &self.excited).trace().re.clamp(0.0, 1.0))
    }

    /// Mean of `shots` seeded `±1` ancilla readouts.
    pub fn sampled(&self, rho: &ComplexMatrix, shots: u64, seed: u64) -> Result<f64> {
        let p1 = self.probability_one(rho)?;
        Ok(sample_z_mean(p1, shots, &mut rng_from_seed(seed)))
    }

    fn check_rho(&self, rho: &ComplexMatrix) -> Result<()> {
        if rho.nrows() != self.observable.nrows() || !rho.is_square() {
            return Err(Error::contract(format!(
                "density matrix is {}x{}, expected dimension {}",
                rho.nrows(),
                rho.ncols(),
                self.observable.nrows()
            )));
        }
        check_density(rho)
    }
}

/// Mean of `shots` readouts of `Z` on a qubit with `P(1) = p1`.
pub fn sample_z_mean<R: Rng + ?Sized>(p1: f64, shots: u64, rng: &mut R) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    let ones = (0..shots).filter(|_| rng.gen::<f64>() < p1).count() as f64;
    1.0 - 2.0 * ones / shots as f64
}

/// Exact phase evaluation `Σ_j ⟨χ_j|ρ|χ_j⟩ F(τ_j)` through the circuit.
pub fn phase_evaluate(f: &LaurentPoly, u: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    PhaseEvaluator::new(f, u)?.expectation(rho)
}

/// Shot-sampled phase evaluation.
pub fn phase_evaluate_sampled(
    f: &LaurentPoly,
    u: &ComplexMatrix,
    rho: &ComplexMatrix,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    PhaseEvaluator::new(f, u)?.sampled(rho, shots, seed)
}
