//! Entropy estimation through `tr(ρ f(σ))` read from one ancilla qubit.
//!
//! The circuit prepares a purification `|Ψ_ρ⟩` on a system register and a
//! reference register `B`, then runs a phase processor on the qubitized
//! encoding of `σ` acting on the system register. The ancilla `⟨Z⟩` equals
//! `tr(ρ f(σ))` when the processor realizes `f(cos τ)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{
    compose_cosine, fractional_monomial_poly, fractional_monomial_scale, log_poly, power_poly,
    RealPoly,
};
use crate::blockenc::{density_block_encoding, purified_oracle, QubitizedEncoding};
use crate::error::{Error, Result};
use crate::laurent::roots;
use crate::linalg::{
    c, check_density, check_unitary, eig_hermitian, identity, kron, rng_from_seed, ComplexMatrix,
    C64,
};
use crate::phasesearch::{amplitude_estimation, QpsConfig};
use crate::qpp::{sample_z_mean, stream, ANCILLA_QUBITS};
use crate::qsp::{angles_for_expectation, AngleSet};

/// Confidence level behind every reported sampling half-width.
pub const CONFIDENCE: f64 = 0.9;

/// Upper limit on shots spent by [`Mode::Adaptive`].
pub const SHOT_CAP: u64 = 10_000_000;

/// Largest number of power traces accepted by [`newton_girard`].
pub const MAX_POWER_TRACES: usize = 8;

/// How the ancilla expectation is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Dense expectation of the ancilla `Z`.
    Exact,
    /// Mean of a fixed number of `±1` readouts.
    Shots(u64),
    /// Shots doubled from an initial budget until the Chebyshev half-width
    /// drops below the target, up to [`SHOT_CAP`].
    Adaptive,
    /// Amplitude estimation of the probability of reading 1, to precision `delta`.
    AmplitudeEstimation { delta: f64 },
}

/// One reading of `tr(ρ f(σ))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEstimate {
    pub value: f64,
    /// Half-width of a `CONFIDENCE` interval around `value`; zero in exact mode.
    pub half_width: f64,
    pub shots: u64,
    /// Calls to the purified oracles and their inverses.
    pub oracle_queries: u64,
    /// Qubits measured to produce the estimate.
    pub measured_qubits: usize,
}

/// Phase processor for a fixed real polynomial, reusable across inputs.
#[derive(Debug, Clone)]
pub struct TraceCircuit {
    poly: RealPoly,
    angles: AngleSet,
}

impl TraceCircuit {
    /// Requires `|f| ≤ 1` on `[−1, 1]`.
    pub fn new(f: &RealPoly) -> Result<Self> {
        let bound = f.max_abs_on(-1.0, 1.0);
        if bound > 1.0 + 1e-12 {
            return Err(Error::contract(format!(
                "polynomial reaches {bound:.6} on [-1, 1], must be bounded by 1"
            )));
        }
        let angles = angles_for_expectation(&compose_cosine(f))?;
        Ok(Self { poly: f.clone(), angles })
    }

    pub fn polynomial(&self) -> &RealPoly {
        &self.poly
    }

    /// Controlled-`Û` applications per run.
    pub fn layers(&self) -> usize {
        self.angles.layers()
    }

    /// Qubits read out; always the single phase-processing ancilla.
    pub fn measured_qubits(&self) -> usize {
        ANCILLA_QUBITS
    }

    /// Exact `⟨Z⟩` and `P(1)` on `(V(Û_σ) ⊗ I_B)|0⟩|0…0⟩|Ψ_ρ⟩`.
    pub fn exact(&self, rho_oracle: &ComplexMatrix, sigma: &QubitizedEncoding) -> Result<(f64, f64)> {
        let (n, h0) = self.input_halves(rho_oracle, sigma)?;
        let u = sigma.unitary();
        let h1 = ComplexMatrix::zeros(u.nrows(), n);
        let (o0, o1) = stream(&self.angles, u, &u.adjoint(), h0, h1);
        let p0 = o0.norm_squared();
        let p1 = o1.norm_squared();
        Ok((p0 - p1, p1.clamp(0.0, 1.0)))
    }

    /// Oracle calls in one run. A density encoding calls its purified oracle
    /// twice per `Û_σ`, and preparing `|Ψ_ρ⟩` takes one more call.
    pub fn queries_per_run(&self) -> u64 {
        (2 * self.layers() + 1) as u64
    }

    /// Runs the circuit in the requested mode. `target` is the sampling
    /// half-width aimed for in adaptive mode.
    pub fn estimate<R: Rng>(
        &self,
        rho_oracle: &ComplexMatrix,
        sigma: &QubitizedEncoding,
        mode: Mode,
        target: f64,
        rng: &mut R,
    ) -> Result<TraceEstimate> {
        let per_run = self.queries_per_run();
        let out = |value, half_width, shots: u64, oracle_queries| TraceEstimate {
            value,
            half_width,
            shots,
            oracle_queries,
            measured_qubits: self.measured_qubits(),
        };
        match mode {
            Mode::Exact => {
                let (e, _) = self.exact(rho_oracle, sigma)?;
                Ok(out(e, 0.0, 0, per_run))
            }
            Mode::Shots(shots) => {
                if shots == 0 {
                    return Err(Error::contract("shot count must be at least 1"));
                }
                let (_, p1) = self.exact(rho_oracle, sigma)?;
                let e = sample_z_mean(p1, shots, rng);
                Ok(out(e, chebyshev_half_width(e, shots), shots, shots * per_run))
            }
            Mode::Adaptive => {
                if !(target > 0.0) {
                    return Err(Error::contract("adaptive sampling needs a positive target"));
                }
                let (_, p1) = self.exact(rho_oracle, sigma)?;
                let mut shots = initial_shots(target);
                let mut total = 0u64;
                loop {
                    let e = sample_z_mean(p1, shots, rng);
                    total += shots;
                    let hw = chebyshev_half_width(e, shots);
                    if hw <= target {
                        return Ok(out(e, hw, shots, total * per_run));
                    }
                    if shots >= SHOT_CAP {
                        return Err(Error::Resource(format!(
                            "half-width {hw:.3e} still above target {target:.3e} at {shots} shots"
                        )));
                    }
                    shots = (shots * 2).min(SHOT_CAP);
                }
            }
            Mode::AmplitudeEstimation { delta } => {
                let a = self.state_preparation(rho_oracle, sigma)?;
                let cfg = QpsConfig::with_defaults(1.0 - CONFIDENCE, delta)?;
                let ae = amplitude_estimation(&a, cfg, rng)?;
                let amp = ae.amplitude.min(1.0);
                let e = 1.0 - 2.0 * amp * amp;
                // d(1 − 2a²)/da = −4a, and the phase error δ moves a by at most δ/2.
                let hw = 2.0 * delta * (amp + delta);
                // Each Grover step uses the preparation twice.
                let queries = 2 * ae.queries.controlled_u_applications * per_run;
                Ok(out(e, hw, 0, queries))
            }
        }
    }

    /// Unitary on `[ancilla, flags, sys, B]` whose first column is the circuit output.
    pub fn state_preparation(
        &self,
        rho_oracle: &ComplexMatrix,
        sigma: &QubitizedEncoding,
    ) -> Result<ComplexMatrix> {
        let (n, _) = self.input_halves(rho_oracle, sigma)?;
        let u = sigma.unitary();
        let dim = u.nrows();
        let flags = dim / n;
        // U_ρ on [sys, B] after the flag register, then V(Û) ⊗ I_B.
        let prep = kron(&identity(2 * flags), rho_oracle);
        let lifted_u = kron(u, &identity(n));
        let lifted_dag = lifted_u.adjoint();
        let big = dim * n;
        let (v0, v1) = stream(
            &self.angles,
            &lifted_u,
            &lifted_dag,
            ComplexMatrix::identity(big, big),
            ComplexMatrix::zeros(big, big),
        );
        let (w0, w1) = stream(
            &self.angles,
            &lifted_u,
            &lifted_dag,
            ComplexMatrix::zeros(big, big),
            ComplexMatrix::identity(big, big),
        );
        let mut v = ComplexMatrix::zeros(2 * big, 2 * big);
        v.view_mut((0, 0), (big, big)).copy_from(&v0);
        v.view_mut((big, 0), (big, big)).copy_from(&v1);
        v.view_mut((0, big), (big, big)).copy_from(&w0);
        v.view_mut((big, big), (big, big)).copy_from(&w1);
        Ok(v * prep)
    }

    /// Purification reshaped so the reference register rides along as columns.
    fn input_halves(
        &self,
        rho_oracle: &ComplexMatrix,
        sigma: &QubitizedEncoding,
    ) -> Result<(usize, ComplexMatrix)> {
        check_unitary(rho_oracle)?;
        let n = 1usize << sigma.system_qubits();
        if rho_oracle.nrows() != n * n {
            return Err(Error::contract(format!(
                "purified oracle has dimension {}, expected {} for a {}-qubit system",
                rho_oracle.nrows(),
                n * n,
                sigma.system_qubits()
            )));
        }
        let mut h0 = ComplexMatrix::zeros(sigma.unitary().nrows(), n);
        for a in 0..n {
            for b in 0..n {
                h0[(a, b)] = rho_oracle[(a * n + b, 0)];
            }
        }
        Ok((n, h0))
    }
}

/// Half-width `√(Var/(n(1−CONFIDENCE)))` with the Bernoulli variance `1 − Ê²`.
fn chebyshev_half_width(e: f64, shots: u64) -> f64 {
    let var = (1.0 - e * e).max(1.0 / shots as f64);
    (var / (shots as f64 * (1.0 - CONFIDENCE))).sqrt()
}

/// Shot budget `1/target²`, the `O(1/ε²)` count with unit constant.
fn initial_shots(target: f64) -> u64 {
    (1.0 / (target * target)).ceil().clamp(16.0, SHOT_CAP as f64) as u64
}

/// `tr(ρ f(σ))` read from the ancilla of the phase processor on `Û_σ`.
pub fn trace_rho_f_sigma(
    rho_oracle: &ComplexMatrix,
    sigma: &QubitizedEncoding,
    f: &RealPoly,
    mode: Mode,
    seed: u64,
) -> Result<TraceEstimate> {
    let circuit = TraceCircuit::new(f)?;
    let target = 1.0 / (SHOT_CAP as f64).sqrt();
    circuit.estimate(rho_oracle, sigma, mode, target, &mut rng_from_seed(seed))
}

/// Which entropy to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    VonNeumann,
    Relative,
    Renyi { alpha: f64 },
}

impl EntropyKind {
    fn needs_floor(&self) -> bool {
        match self {
            EntropyKind::Renyi { alpha } => alpha.fract() != 0.0,
            _ => true,
        }
    }
}

/// Parameters shared by the entropy estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyRequest {
    pub kind: EntropyKind,
    /// Lower bound on the nonzero eigenvalues.
    pub gamma: Option<f64>,
    /// Rank bound, used to choose the floor when `gamma` is absent.
    pub kappa: Option<usize>,
    pub eps: f64,
    pub mode: Mode,
    pub seed: u64,
}

impl EntropyRequest {
    pub fn new(kind: EntropyKind, eps: f64) -> Self {
        Self { kind, gamma: None, kappa: None, eps, mode: Mode::Exact, seed: 0 }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_kappa(mut self, kappa: usize) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Result of an entropy estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// `+∞` signals a relative entropy with a support violation.
    pub estimate: f64,
    /// Approximation plus sampling error bound at `CONFIDENCE`.
    pub half_width: f64,
    pub shots_used: u64,
    pub queries: u64,
    /// The raw ancilla expectations the estimate was computed from.
    pub expectations: Vec<f64>,
    pub measured_qubits: usize,
    pub warnings: Vec<String>,
}

/// How the ancilla expectation maps back to the entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Readback {
    /// `S = −2 ln γ · E`.
    Log { gamma: f64 },
    /// `tr ρ^α = scale · E`.
    Power { alpha: f64, scale: f64 },
}

/// Entropy estimator with its polynomial and circuit angles built once.
#[derive(Debug, Clone)]
pub struct EntropyEstimator {
    kind: EntropyKind,
    eps: f64,
    gamma: Option<f64>,
    kappa: Option<usize>,
    circuit: TraceCircuit,
    readback: Readback,
    /// Sup error of the polynomial against its target on `[γ, 1]`.
    approx_error: f64,
    /// Extra bias from eigenvalues below the floor, `2κγ` in rank mode.
    tail_bias: f64,
    /// Target half-width on each ancilla expectation.
    sample_target: f64,
}

impl EntropyEstimator {
    pub fn new(kind: EntropyKind, gamma: Option<f64>, kappa: Option<usize>, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::contract(format!("eps = {eps} must lie in (0, 1)")));
        }
        if let Some(g) = gamma {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::contract(format!("gamma = {g} must lie in (0, 1)")));
            }
        }
        if kappa == Some(0) {
            return Err(Error::contract("rank bound kappa must be at least 1"));
        }
        if let EntropyKind::Renyi { alpha } = kind {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::contract(format!("alpha = {alpha} must be positive")));
            }
            if alpha == 1.0 {
                return Err(Error::contract(
                    "alpha = 1 is the von Neumann entropy; use the von Neumann estimator",
                ));
            }
        }
        if kind.needs_floor() && gamma.is_none() && kappa.is_none() {
            return Err(Error::contract("this entropy needs an eigenvalue floor gamma or a rank kappa"));
        }
        match kind {
            EntropyKind::VonNeumann | EntropyKind::Relative => Self::logarithmic(kind, gamma, kappa, eps),
            EntropyKind::Renyi { alpha } => Self::power(alpha, gamma, kappa, eps),
        }
    }

    pub fn from_request(req: &EntropyRequest) -> Result<Self> {
        Self::new(req.kind, req.gamma, req.kappa, req.eps)
    }

    fn logarithmic(kind: EntropyKind, gamma: Option<f64>, kappa: Option<usize>, eps: f64) -> Result<Self> {
        let relative = kind == EntropyKind::Relative;
        let (g, tail_bias, budget) = match (gamma, kappa) {
            (Some(g), _) => (g, 0.0, if relative { 8.0 } else { 4.0 }),
            (None, Some(k)) => {
                let k = k as f64;
                let g = eps / (16.0 * k * (k / eps).ln().max(1.0));
                (g, 2.0 * k * g, if relative { 16.0 } else { 8.0 })
            }
            (None, None) => unreachable!(),
        };
        let g = g.min(0.5);
        let eta = eps / (budget * (1.0 / g).ln());
        let poly = log_poly(g, eta)?;
        let scale = 1.0 / (2.0 * g.ln());
        let approx_error = poly.max_error_on(g, 1.0, |x| x.ln() * scale);
        let circuit = TraceCircuit::new(&poly)?;
        Ok(Self {
            kind,
            eps,
            gamma: Some(g),
            kappa,
            circuit,
            readback: Readback::Log { gamma: g },
            approx_error,
            tail_bias,
            sample_target: eta,
        })
    }

    fn power(alpha: f64, gamma: Option<f64>, kappa: Option<usize>, eps: f64) -> Result<Self> {
        let kind = EntropyKind::Renyi { alpha };
        let floor_int = alpha.floor();
        if alpha.fract() == 0.0 {
            // Integer order: the monomial x^{α−1} is exact.
            let k = alpha as usize - 1;
            let mut coefficients = vec![0.0; k + 1];
            coefficients[k] = 1.0;
            let poly = RealPoly::monomial(coefficients);
            let circuit = TraceCircuit::new(&poly)?;
            let lower = power_trace_floor(alpha, gamma, kappa, None);
            return Ok(Self {
                kind,
                eps,
                gamma,
                kappa,
                circuit,
                readback: Readback::Power { alpha, scale: 1.0 },
                approx_error: 0.0,
                tail_bias: 0.0,
                sample_target: 0.5 * (1.0 - alpha).abs() * lower * eps,
            });
        }
        let eps_prime = 0.5 * (1.0 - alpha).abs() * power_trace_floor(alpha, gamma, kappa, None) * eps;
        let (g, tail_bias) = match (gamma, kappa) {
            (Some(g), _) => (g, 0.0),
            (None, Some(k)) => {
                let k = k as f64;
                let g = if alpha < 1.0 {
                    (eps_prime / (8.0 * k)).powf(1.0 / alpha)
                } else {
                    eps_prime / (16.0 * k * (16.0 * k / eps_prime).ln())
                };
                (g, 2.0 * k * g)
            }
            (None, None) => unreachable!(),
        };
        let g = g.min(0.45);
        let (poly, scale, target): (RealPoly, f64, Box<dyn Fn(f64) -> f64>) = if alpha < 1.0 {
            let c_exp = 1.0 - alpha;
            let scale = 2.0 * g.powf(alpha - 1.0);
            let eta = eps_prime / (2.0 * scale);
            let pre = 0.5 * g.powf(c_exp);
            let poly = power_poly(c_exp, g, eta)?;
            (poly, scale, Box::new(move |x: f64| pre * x.powf(-c_exp)))
        } else {
            let scale = fractional_monomial_scale(g);
            let eta = eps_prime / (2.0 * scale);
            let s = alpha - floor_int;
            let base = fractional_monomial_poly(s, g, eta)?;
            let poly = base.times_power(floor_int as usize - 1);
            let bound = poly.max_abs_on(-1.0, 1.0);
            if bound > 1.0 {
                return Err(Error::Conditioning {
                    step: 0,
                    detail: "product with the integer monomial leaves [-1, 1]".into(),
                    residual: bound - 1.0,
                });
            }
            (poly, scale, Box::new(move |x: f64| x.powf(alpha - 1.0) / scale))
        };
        let approx_error = poly.max_error_on(g, 1.0, target);
        let circuit = TraceCircuit::new(&poly)?;
        Ok(Self {
            kind,
            eps,
            gamma: Some(g),
            kappa,
            circuit,
            readback: Readback::Power { alpha, scale },
            approx_error,
            tail_bias,
            sample_target: eps_prime / (2.0 * scale),
        })
    }

    pub fn kind(&self) -> EntropyKind {
        self.kind
    }

    /// The eigenvalue floor in use, chosen from `kappa` if not given.
    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn polynomial(&self) -> &RealPoly {
        self.circuit.polynomial()
    }

    pub fn circuit(&self) -> &TraceCircuit {
        &self.circuit
    }

    /// Sup error of the polynomial against its target on `[γ, 1]`.
    pub fn approximation_error(&self) -> f64 {
        self.approx_error
    }

    /// Estimates the entropy of `rho`, or `D(ρ‖σ)` when the kind is relative.
    pub fn estimate(
        &self,
        rho: &ComplexMatrix,
        sigma: Option<&ComplexMatrix>,
        mode: Mode,
        seed: u64,
    ) -> Result<EntropyEstimate> {
        check_density(rho)?;
        let mut rng = rng_from_seed(seed);
        let mut warnings = Vec::new();
        self.check_floor("rho", rho, &mut warnings)?;
        let u_rho = purified_oracle(rho)?;
        let enc_rho = density_block_encoding(&u_rho)?;
        match self.kind {
            EntropyKind::VonNeumann => {
                let t = self.circuit.estimate(&u_rho, &enc_rho, mode, self.sample_target, &mut rng)?;
                let Readback::Log { gamma } = self.readback else { unreachable!() };
                let factor = 2.0 * (1.0 / gamma).ln();
                Ok(EntropyEstimate {
                    estimate: factor * t.value,
                    half_width: factor * (self.approx_error + t.half_width) + self.tail_bias,
                    shots_used: t.shots,
                    queries: t.oracle_queries,
                    expectations: vec![t.value],
                    measured_qubits: t.measured_qubits,
                    warnings,
                })
            }
            EntropyKind::Relative => {
                let sigma = sigma.ok_or_else(|| Error::contract("relative entropy needs sigma"))?;
                check_density(sigma)?;
                if sigma.nrows() != rho.nrows() {
                    return Err(Error::contract("rho and sigma have different dimensions"));
                }
                self.check_floor("sigma", sigma, &mut warnings)?;
                if let Some(leak) = support_violation(rho, sigma)? {
                    warnings.push(format!(
                        "support of rho meets the kernel of sigma (weight {leak:.3e}); divergence is infinite"
                    ));
                    return Ok(EntropyEstimate {
                        estimate: f64::INFINITY,
                        half_width: 0.0,
                        shots_used: 0,
                        queries: 0,
                        expectations: Vec::new(),
                        measured_qubits: self.circuit.measured_qubits(),
                        warnings,
                    });
                }
                let enc_sigma = density_block_encoding(&purified_oracle(sigma)?)?;
                let er = self.circuit.estimate(&u_rho, &enc_rho, mode, self.sample_target, &mut rng)?;
                let es = self.circuit.estimate(&u_rho, &enc_sigma, mode, self.sample_target, &mut rng)?;
                let Readback::Log { gamma } = self.readback else { unreachable!() };
                let factor = 2.0 * (1.0 / gamma).ln();
                Ok(EntropyEstimate {
                    estimate: -factor * (er.value - es.value),
                    half_width: factor * (2.0 * self.approx_error + er.half_width + es.half_width)
                        + 2.0 * self.tail_bias,
                    shots_used: er.shots + es.shots,
                    queries: er.oracle_queries + es.oracle_queries,
                    expectations: vec![er.value, es.value],
                    measured_qubits: er.measured_qubits,
                    warnings,
                })
            }
            EntropyKind::Renyi { .. } => {
                let Readback::Power { alpha, scale } = self.readback else { unreachable!() };
                let floor = power_trace_floor(alpha, self.gamma, self.kappa, Some(rho.nrows()));
                let target = 0.5 * (1.0 - alpha).abs() * floor * self.eps / (2.0 * scale);
                let t = self.circuit.estimate(&u_rho, &enc_rho, mode, target, &mut rng)?;
                let trace = scale * t.value;
                let trace_hw = scale * (self.approx_error + t.half_width) + self.tail_bias;
                if trace <= 0.0 {
                    return Err(Error::Conditioning {
                        step: 0,
                        detail: "power trace estimate is not positive".into(),
                        residual: trace,
                    });
                }
                let lower = (trace - trace_hw).max(0.5 * trace);
                Ok(EntropyEstimate {
                    estimate: trace.ln() / (1.0 - alpha),
                    half_width: trace_hw / ((1.0 - alpha).abs() * lower),
                    shots_used: t.shots,
                    queries: t.oracle_queries,
                    expectations: vec![t.value],
                    measured_qubits: t.measured_qubits,
                    warnings,
                })
            }
        }
    }

    /// Eigenvalues strictly between zero and the floor break the accuracy guarantee.
    fn check_floor(&self, name: &str, m: &ComplexMatrix, warnings: &mut Vec<String>) -> Result<()> {
        let spec = eig_hermitian(m)?;
        let eigs: Vec<f64> = spec.eigenvalues.iter().map(|z| z.re).collect();
        let rank = eigs.iter().filter(|&&p| p > 1e-10).count();
        match (self.kind.needs_floor(), self.kappa) {
            (_, Some(k)) if rank > k => {
                warnings.push(format!("{name} has rank {rank} above the bound kappa = {k}"));
            }
            (true, None) => {
                let g = self.gamma.unwrap_or(0.0);
                if let Some(p) = eigs.iter().find(|&&p| p > 1e-10 && p < g) {
                    warnings.push(format!("{name} has eigenvalue {p:.3e} below the floor gamma = {g}"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Lower bound on `tr ρ^α` from the known rank information.
fn power_trace_floor(alpha: f64, gamma: Option<f64>, kappa: Option<usize>, dim: Option<usize>) -> f64 {
    if alpha < 1.0 {
        return 1.0;
    }
    let mut rank = f64::INFINITY;
    if let Some(g) = gamma {
        rank = rank.min((1.0 / g).floor());
    }
    if let Some(k) = kappa {
        rank = rank.min(k as f64);
    }
    if let Some(d) = dim {
        rank = rank.min(d as f64);
    }
    if rank.is_infinite() {
        // No information: fall back to a single-qubit bound.
        rank = 2.0;
    }
    rank.powf(1.0 - alpha)
}

/// Weight of `ρ` on the numerical kernel of `σ`, if above tolerance.
fn support_violation(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<Option<f64>> {
    let spec = eig_hermitian(sigma)?;
    let mut leak = 0.0;
    for (j, z) in spec.eigenvalues.iter().enumerate() {
        if z.re < 1e-12 {
            let v = spec.eigenvector(j);
            leak += (v.adjoint() * rho * &v)[(0, 0)].re;
        }
    }
    Ok((leak > 1e-10).then_some(leak))
}

/// Von Neumann entropy `S(ρ)`.
pub fn von_neumann(rho: &ComplexMatrix, req: &EntropyRequest) -> Result<EntropyEstimate> {
    if req.kind != EntropyKind::VonNeumann {
        return Err(Error::contract("request kind must be von_neumann"));
    }
    EntropyEstimator::from_request(req)?.estimate(rho, None, req.mode, req.seed)
}

/// Relative entropy `D(ρ‖σ) = tr ρ(ln ρ − ln σ)`.
pub fn relative_entropy(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    req: &EntropyRequest,
) -> Result<EntropyEstimate> {
    if req.kind != EntropyKind::Relative {
        return Err(Error::contract("request kind must be relative"));
    }
    EntropyEstimator::from_request(req)?.estimate(rho, Some(sigma), req.mode, req.seed)
}

/// Rényi entropy `S_α(ρ) = ln tr(ρ^α) / (1 − α)`.
pub fn renyi(rho: &ComplexMatrix, req: &EntropyRequest) -> Result<EntropyEstimate> {
    if !matches!(req.kind, EntropyKind::Renyi { .. }) {
        return Err(Error::contract("request kind must be renyi"));
    }
    EntropyEstimator::from_request(req)?.estimate(rho, None, req.mode, req.seed)
}

/// Largest eigenvalues from power traces `p_k = tr ρ^k`, `k = 1..=K`.
///
/// Newton's identities give the elementary symmetric polynomials, and the
/// roots of `x^K − e₁x^{K−1} + e₂x^{K−2} − …` are the eigenvalue estimates.
pub fn newton_girard(power_traces: &[f64]) -> Result<Vec<f64>> {
    let k_max = power_traces.len();
    if k_max == 0 || k_max > MAX_POWER_TRACES {
        return Err(Error::contract(format!(
            "need between 1 and {MAX_POWER_TRACES} power traces, got {k_max}"
        )));
    }
    let drift = (power_traces[0] - 1.0).abs();
    if drift > 1e-2 {
        return Err(Error::validation("first power trace |tr ρ − 1|", drift, 1e-2));
    }
    let mut e = vec![1.0; k_max + 1];
    for k in 1..=k_max {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * power_traces[i - 1];
        }
        e[k] = acc / k as f64;
    }
    // Ascending coefficients: constant term (−1)^K e_K up to the leading 1.
    let coeffs: Vec<C64> = (0..=k_max)
        .map(|j| {
            let i = k_max - j;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            c(sign * e[i], 0.0)
        })
        .collect();
    let mut eig: Vec<f64> = if coeffs[..k_max].iter().all(|z| z.norm() < 1e-15) {
        vec![0.0; k_max]
    } else {
        let zs = roots(&coeffs)?;
        let mut zs = zs;
        // Roots at zero are lost when the constant term vanishes exactly.
        while zs.len() < k_max {
            zs.push(c(0.0, 0.0));
        }
        let worst = zs.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if worst > 1e-2 {
            return Err(Error::Conditioning {
                step: 0,
                detail: "power traces admit no real spectrum".into(),
                residual: worst,
            });
        }
        zs.iter().map(|z| z.re).collect()
    };
    for v in &mut eig {
        *v = v.clamp(0.0, 1.0);
    }
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}

/// `tr ρ^k` for `k = 1..=k_max`, computed densely.
pub fn power_traces(rho: &ComplexMatrix, k_max: usize) -> Result<Vec<f64>> {
    let spec = eig_hermitian(rho)?;
    Ok((1..=k_max)
        .map(|k| spec.eigenvalues.iter().map(|z| z.re.max(0.0).powi(k as i32)).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_function;
    use crate::random::random_density;

    fn diag(p: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(p.len(), p.len());
        for (i, &v) in p.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        m
    }

    #[test]
    fn trace_matches_dense_algebra() {
        let mut rng = rng_from_seed(3);
        let rho = random_density(4, 4, 0.0, &mut rng);
        let sigma = random_density(4, 4, 0.0, &mut rng);
        let f = RealPoly::monomial(vec![0.1, -0.3, 0.5]);
        let enc = density_block_encoding(&purified_oracle(&sigma).unwrap()).unwrap();
        let got = trace_rho_f_sigma(&purified_oracle(&rho).unwrap(), &enc, &f, Mode::Exact, 0).unwrap();
        let fs = hermitian_function(&sigma, |x| c(f.evaluate(x), 0.0)).unwrap();
        let want = (&rho * fs).trace().re;
        assert!((got.value - want).abs() < 1e-6, "{} vs {}", got.value, want);
    }

    #[test]
    fn closed_forms() {
        let req = EntropyRequest::new(EntropyKind::VonNeumann, 1e-2).with_gamma(0.4);
        let s = von_neumann(&diag(&[0.5, 0.5]), &req).unwrap();
        assert!((s.estimate - 2f64.ln()).abs() < 1e-2, "{}", s.estimate);
        let req = EntropyRequest::new(EntropyKind::Renyi { alpha: 2.0 }, 1e-2);
        let s = renyi(&diag(&[0.75, 0.25]), &req).unwrap();
        assert!((s.estimate + 0.625f64.ln()).abs() < 1e-6, "{}", s.estimate);
    }

    #[test]
    fn newton_girard_three_levels() {
        let eig = newton_girard(&[1.0, 0.54, 0.352]).unwrap();
        for (a, b) in eig.iter().zip([0.7, 0.2, 0.1]) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
