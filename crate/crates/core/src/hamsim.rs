//! Hamiltonian simulation and eigenvalue extraction on a qubitized encoding.
//!
//! Each eigenvalue `λ` of `H` lifts to eigenphases `±arccos(λ/Λ)` of the
//! qubitized walk `Û`, so a phase processor for `e^{−iΛt cos τ}` applies
//! `e^{−iHt}` on the flagged block, and a phase estimate `τ̂` gives back
//! `λ̂ = Λ cos τ̂`.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::approx::{jacobi_anger, jacobi_anger_order};
use crate::blockenc::{encode_hermitian, qubitize, QubitizedEncoding};
use crate::error::{Error, Result};
use crate::linalg::{
    check_hermitian, eig_hermitian, hermitian_function, identity, spectral_norm, ComplexMatrix,
    StateVector, C64,
};
use crate::phasesearch::{PhaseSearch, QpsConfig};
use crate::qpp::stream;
use crate::qsp::angles_for_projection;

/// Largest system register accepted by [`simulate`].
pub const MAX_SYSTEM_QUBITS: usize = 3;

/// Evolution request for `e^{−iHt}` to precision `delta`.
#[derive(Debug, Clone)]
pub struct SimRequest {
    pub hamiltonian: ComplexMatrix,
    /// Normalization `Λ ≥ ‖H‖`.
    pub lambda: f64,
    pub time: f64,
    pub delta: f64,
}

impl SimRequest {
    /// Request with `Λ = ‖H‖`.
    pub fn new(hamiltonian: ComplexMatrix, time: f64, delta: f64) -> Self {
        let lambda = spectral_norm(&hamiltonian);
        Self { hamiltonian, lambda, time, delta }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// The simulated block and its diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SimOutcome {
    /// Flagged block of the assembled circuit, approximately `e^{−iHt}`.
    #[serde(skip)]
    pub block: ComplexMatrix,
    /// Jacobi–Anger truncation order `N`.
    pub truncation_order: usize,
    /// Controlled-`Û` applications, `2N`.
    pub queries: usize,
    /// `Λ|t| + ln(2/δ²)/ln(e + ln(2/δ²)/(Λ|t|))`, the asymptotic count with unit constant.
    pub asymptotic_queries: f64,
    /// Spectral norm of `block − e^{−iHt}`.
    pub error_vs_exact: f64,
    /// Smallest probability, over input states, that every ancilla reads zero.
    pub success_probability: f64,
    /// `‖B†B − I‖`.
    pub unitarity_residual: f64,
}

fn check_request(req: &SimRequest) -> Result<usize> {
    check_hermitian(&req.hamiltonian)?;
    let n = req.hamiltonian.nrows();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::contract(format!("Hamiltonian dimension {n} is not a power of two ≥ 2")));
    }
    let qubits = n.trailing_zeros() as usize;
    if qubits > MAX_SYSTEM_QUBITS {
        return Err(Error::Resource(format!(
            "{qubits} system qubits exceed the simulation limit of {MAX_SYSTEM_QUBITS}"
        )));
    }
    let norm = spectral_norm(&req.hamiltonian);
    if !(req.lambda > 0.0) || norm > req.lambda + 1e-8 {
        return Err(Error::contract(format!(
            "Lambda = {} must be positive and at least ‖H‖ = {norm}",
            req.lambda
        )));
    }
    if !req.time.is_finite() {
        return Err(Error::contract("evolution time must be finite"));
    }
    Ok(qubits)
}

/// Qubitized encoding of `H/Λ`.
pub fn walk_operator(h: &ComplexMatrix, lambda: f64) -> Result<QubitizedEncoding> {
    qubitize(&encode_hermitian(h, lambda)?)
}

/// `e^{−iHt}` from the eigendecomposition of `H`.
pub fn exact_evolution(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    hermitian_function(h, |x| C64::from_polar(1.0, -x * t))
}

/// Asymptotic query count `Λ|t| + ln(2/δ²)/ln(e + ln(2/δ²)/(Λ|t|))` with unit constant.
pub fn asymptotic_queries(lambda_t: f64, delta: f64) -> f64 {
    let lt = lambda_t.abs();
    if lt == 0.0 {
        return 0.0;
    }
    let l = (2.0 / (delta * delta)).ln();
    lt + l / (std::f64::consts::E + l / lt).ln()
}

/// Simulates `e^{−iHt}` as the flagged block of a phase processor on `Û_{H/Λ}`.
pub fn simulate(req: &SimRequest) -> Result<SimOutcome> {
    check_request(req)?;
    let lt = req.lambda * req.time;
    let f = jacobi_anger(lt, req.delta)?;
    let angles = angles_for_projection(&f)?;
    let walk = walk_operator(&req.hamiltonian, req.lambda)?;
    let u = walk.unitary();
    let n = req.hamiltonian.nrows();
    let mut h0 = ComplexMatrix::zeros(u.nrows(), n);
    h0.view_mut((0, 0), (n, n)).copy_from(&identity(n));
    let h1 = ComplexMatrix::zeros(u.nrows(), n);
    let (o0, _) = stream(&angles, u, &u.adjoint(), h0, h1);
    let block = o0.view((0, 0), (n, n)).into_owned();

    let exact = exact_evolution(&req.hamiltonian, req.time)?;
    let error_vs_exact = spectral_norm(&(&block - &exact));
    let gram = block.adjoint() * &block;
    let unitarity_residual = spectral_norm(&(&gram - identity(n)));
    let success_probability = eig_hermitian(&gram)?
        .eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
        .clamp(0.0, 1.0);
    // The Laurent degree is 2N in half-index units, one layer per unit.
    let truncation_order = f.degree() / 2;
    Ok(SimOutcome {
        block,
        truncation_order,
        queries: angles.layers(),
        asymptotic_queries: asymptotic_queries(lt, req.delta),
        error_vs_exact,
        success_probability,
        unitarity_residual,
    })
}

/// Truncation order the asymptotic bound suggests for the same request.
pub fn suggested_order(req: &SimRequest) -> usize {
    jacobi_anger_order(req.lambda * req.time, req.delta)
}

/// One eigenvalue recovered by phase search on the walk operator.
#[derive(Debug, Clone)]
pub struct EigenEstimate {
    pub eigenvalue: f64,
    pub phase: f64,
    pub queries: u64,
    /// Probability that the flag register reads all zeros on the collapsed state.
    pub flag_probability: f64,
    /// System state left after post-selecting the flags on zero.
    pub eigenvector: StateVector,
}

/// Projects `state` onto all-zero flags; returns the probability and the
/// normalized system state.
pub fn postselect_flags(walk: &QubitizedEncoding, state: &StateVector) -> Result<(f64, StateVector)> {
    let n = 1usize << walk.system_qubits();
    if state.dim() != walk.unitary().nrows() {
        return Err(Error::contract("state does not match the walk operator dimension"));
    }
    let head: DVector<C64> = state.amplitudes().rows(0, n).into_owned();
    let p = head.norm_squared();
    if p < 1e-14 {
        return Err(Error::Conditioning {
            step: 0,
            detail: "flag register never reads zero".into(),
            residual: p,
        });
    }
    Ok((p, StateVector::normalized(head)?))
}

/// Eigenvalues of `H` from phase search on `Û_{H/Λ}`, one run per seed state.
///
/// Each seed is lifted to `|0…0⟩|ψ⟩`; with eigenvectors of `H` as seeds the
/// estimates satisfy `|λ̂ − λ| ≤ Λδ`.
pub fn extract_spectrum_from<R: Rng>(
    h: &ComplexMatrix,
    lambda: f64,
    config: QpsConfig,
    seeds: &[DVector<C64>],
    rng: &mut R,
) -> Result<Vec<EigenEstimate>> {
    check_request(&SimRequest { hamiltonian: h.clone(), lambda, time: 0.0, delta: config.delta })?;
    let walk = walk_operator(h, lambda)?;
    let search = PhaseSearch::new(config)?;
    let mut out = Vec::with_capacity(seeds.len());
    for psi in seeds {
        let chi = StateVector::normalized(walk.lift(psi))?;
        let run = search.run(walk.unitary(), &chi, rng)?;
        let (flag_probability, eigenvector) = postselect_flags(&walk, &run.state)?;
        out.push(EigenEstimate {
            eigenvalue: lambda * run.estimate.cos(),
            phase: run.estimate,
            queries: run.queries.controlled_u_applications,
            flag_probability,
            eigenvector,
        });
    }
    Ok(out)
}

/// [`extract_spectrum_from`] seeded with the exact eigenvectors of `H`.
pub fn extract_spectrum<R: Rng>(
    h: &ComplexMatrix,
    lambda: f64,
    config: QpsConfig,
    rng: &mut R,
) -> Result<Vec<EigenEstimate>> {
    let spec = eig_hermitian(h)?;
    let seeds: Vec<DVector<C64>> = (0..h.nrows()).map(|j| spec.eigenvector(j)).collect();
    extract_spectrum_from(h, lambda, config, &seeds, rng)
}

/// `Λ cos τ` for each phase.
pub fn eigenvalues_from_phases(lambda: f64, phases: &[f64]) -> Vec<f64> {
    phases.iter().map(|t| lambda * t.cos()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, gates, rng_from_seed};
    use crate::random::random_hermitian;

    #[test]
    fn pauli_z_quarter_turn() {
        let req = SimRequest::new(gates::pauli_z(), std::f64::consts::FRAC_PI_2, 1e-3);
        let out = simulate(&req).unwrap();
        assert!((out.block[(0, 0)] - c(0.0, -1.0)).norm() < 1e-3);
        assert!((out.block[(1, 1)] - c(0.0, 1.0)).norm() < 1e-3);
        assert!(out.error_vs_exact < 1e-3);
    }

    #[test]
    fn random_two_qubit_evolution() {
        let mut rng = rng_from_seed(5);
        let h = random_hermitian(4, 1.0, &mut rng);
        for t in [1.0, 3.0] {
            let out = simulate(&SimRequest::new(h.clone(), t, 1e-3)).unwrap();
            assert!(out.error_vs_exact <= 1e-3 + 1e-5, "t = {t}: {}", out.error_vs_exact);
            assert!(out.success_probability >= 1.0 - 2e-3);
            let ratio = out.queries as f64 / out.asymptotic_queries;
            assert!((1.0 / 3.0..=3.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn spectrum_of_pauli_x() {
        let cfg = QpsConfig::with_defaults(0.1, 1e-3).unwrap();
        let est = extract_spectrum(&gates::pauli_x(), 1.0, cfg, &mut rng_from_seed(2)).unwrap();
        let mut vals: Vec<f64> = est.iter().map(|e| e.eigenvalue).collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] + 1.0).abs() < 1e-3 && (vals[1] - 1.0).abs() < 1e-3, "{vals:?}");
    }
}
