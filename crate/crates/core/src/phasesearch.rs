//! Binary-search phase estimation built on a phase classifier.
//!
//! The classifier is a phase processor whose ancilla reads 0 when the
//! eigenphase lies in `[Δ, π−Δ)` and 1 when it lies in `(−π+Δ, −Δ]`.
//! Interval search halves a phase interval with it; phase search repeats
//! interval search on amplified powers `(e^{−iζ}U)^d`.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::approx::square_wave;
use crate::error::{Error, Result};
use crate::linalg::{c, check_unitary, identity, matrix_power, ComplexMatrix, StateVector, C64};
use crate::qpp::{stream, QppCircuit};
use crate::qsp::{angles_for_expectation, AngleSet};

/// Closed phase interval `[lo, hi]` on the unwrapped real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PhaseInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::contract(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn full() -> Self {
        Self { lo: -PI, hi: PI }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Whether `tau` lies in the interval modulo `2π`.
    pub fn contains_mod_2pi(&self, tau: f64) -> bool {
        let shift = (self.mid() - tau) / (2.0 * PI);
        let t = tau + 2.0 * PI * shift.round();
        t >= self.lo - 1e-12 && t <= self.hi + 1e-12
    }
}

/// Parameters of a phase search run and the quantities derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpsConfig {
    /// Classifier transition half-width `Δ ∈ (0, 1/2)`.
    pub transition: f64,
    /// Total failure probability budget.
    pub eps: f64,
    /// Target precision.
    pub delta: f64,
}

/// Default classifier transition half-width.
pub const DEFAULT_TRANSITION: f64 = 0.3;

impl QpsConfig {
    pub fn new(transition: f64, eps: f64, delta: f64) -> Result<Self> {
        if !(transition > 0.0 && transition < 0.5) {
            return Err(Error::contract(format!("Delta = {transition} must lie in (0, 1/2)")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::contract(format!("eps = {eps} must lie in (0, 1)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::contract(format!("delta = {delta} must lie in (0, 1)")));
        }
        let cfg = Self { transition, eps, delta };
        if cfg.amplification() < 2 {
            return Err(Error::contract(format!(
                "Delta = {transition} gives amplification factor {} < 2",
                cfg.amplification()
            )));
        }
        Ok(cfg)
    }

    pub fn with_defaults(eps: f64, delta: f64) -> Result<Self> {
        Self::new(DEFAULT_TRANSITION, eps, delta)
    }

    /// Interval-search iterations per round, `⌈log₂(2π/(1−2Δ))⌉`.
    pub fn iterations(&self) -> usize {
        (2.0 * PI / (1.0 - 2.0 * self.transition)).log2().ceil() as usize
    }

    /// `Δ̄ = Δ + π/2^{Q+1}`.
    pub fn padded_transition(&self) -> f64 {
        self.transition + PI / 2f64.powi(self.iterations() as i32 + 1)
    }

    /// Amplification factor `d = ⌊1/Δ̄⌋`.
    pub fn amplification(&self) -> u64 {
        (1.0 / self.padded_transition()).floor() as u64
    }

    /// Number of rounds `T = ⌈ln(1/δ)/ln d⌉`, so that `d^{−T} ≤ δ`.
    pub fn rounds(&self) -> usize {
        ((1.0 / self.delta).ln() / (self.amplification() as f64).ln()).ceil().max(1.0) as usize
    }

    /// Failure budget of a single classification, `ε/(Q·T)`.
    pub fn per_measurement_eps(&self) -> f64 {
        self.eps / (self.iterations() * self.rounds()) as f64
    }
}

/// Tally of controlled-`U` and controlled-`U†` applications.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounter {
    pub controlled_u_applications: u64,
}

impl QueryCounter {
    pub fn add(&mut self, n: u64) {
        self.controlled_u_applications = self.controlled_u_applications.saturating_add(n);
    }
}

/// Angles of the phase classifier for transition `Δ` and error `ε`.
pub fn classifier_angles(transition: f64, eps: f64) -> Result<AngleSet> {
    let f = square_wave(transition, eps)?;
    angles_for_expectation(&f)
}

/// The phase classifier applied to `U`.
pub fn classifier_circuit(transition: f64, eps: f64, u: &ComplexMatrix) -> Result<QppCircuit> {
    QppCircuit::build(classifier_angles(transition, eps)?, u.clone())
}

/// One classification: returns `P(1)` and the two normalized branch states.
fn classify(
    angles: &AngleSet,
    u: &ComplexMatrix,
    u_dag: &ComplexMatrix,
    state: &DVector<C64>,
) -> (f64, [DVector<C64>; 2]) {
    let n = state.len();
    let h0 = ComplexMatrix::from_column_slice(n, 1, state.as_slice());
    let h1 = ComplexMatrix::zeros(n, 1);
    let (o0, o1) = stream(angles, u, u_dag, h0, h1);
    let p1 = o1.norm_squared().clamp(0.0, 1.0);
    let normalize = |m: ComplexMatrix| {
        let v = DVector::from_column_slice(m.as_slice());
        let nrm = v.norm();
        if nrm > 0.0 { v / c(nrm, 0.0) } else { v }
    };
    (p1, [normalize(o0), normalize(o1)])
}

/// How an ancilla readout is decided from `P(1)`.
pub enum Readout<'a> {
    /// Born-rule sample.
    Sample(&'a mut dyn rand::RngCore),
    /// The more likely outcome; a noiseless reference.
    MostLikely,
}

impl Readout<'_> {
    fn decide(&mut self, p1: f64) -> u8 {
        match self {
            Readout::Sample(rng) => u8::from(rng.gen::<f64>() < p1),
            Readout::MostLikely => u8::from(p1 > 0.5),
        }
    }
}

/// Result of one interval search.
#[derive(Debug, Clone)]
pub struct PisOutcome {
    pub interval: PhaseInterval,
    /// System state after the last readout.
    pub state: StateVector,
    pub queries: QueryCounter,
}

/// Interval update of one search step; the wide rule applies when the width
/// strictly exceeds `2π − 2Δ`.
pub fn update_interval(interval: PhaseInterval, transition: f64, outcome: u8) -> PhaseInterval {
    let (lo, hi, mid, d) = (interval.lo, interval.hi, interval.mid(), transition);
    let wide = interval.width() > 2.0 * PI - 2.0 * d;
    match (wide, outcome) {
        (true, 0) => PhaseInterval { lo: mid - d, hi: hi + d },
        (true, _) => PhaseInterval { lo: lo - d, hi: mid + d },
        (false, 0) => PhaseInterval { lo: mid - d, hi },
        (false, _) => PhaseInterval { lo, hi: mid + d },
    }
}

#[allow(clippy::too_many_arguments)]
fn pis_inner(
    angles: &AngleSet,
    u: &ComplexMatrix,
    state: DVector<C64>,
    mut interval: PhaseInterval,
    transition: f64,
    iterations: usize,
    query_weight: u64,
    readout: &mut Readout<'_>,
) -> (PhaseInterval, DVector<C64>, u64) {
    let mut state = state;
    let mut queries = 0u64;
    for _ in 0..iterations {
        let mid = interval.mid();
        let shifted = u * C64::from_polar(1.0, -mid);
        let shifted_dag = shifted.adjoint();
        let (p1, branches) = classify(angles, &shifted, &shifted_dag, &state);
        let outcome = readout.decide(p1);
        let [b0, b1] = branches;
        state = if outcome == 0 { b0 } else { b1 };
        queries = queries.saturating_add(angles.layers() as u64 * query_weight);
        interval = update_interval(interval, transition, outcome);
    }
    (interval, state, queries)
}

/// Phase interval search: `iterations` classify-and-shrink steps.
pub fn phase_interval_search(
    u: &ComplexMatrix,
    chi: &StateVector,
    interval: PhaseInterval,
    transition: f64,
    eps: f64,
    iterations: usize,
    readout: &mut Readout<'_>,
) -> Result<PisOutcome> {
    check_unitary(u)?;
    check_state_dim(u, chi)?;
    let angles = classifier_angles(transition, eps)?;
    let (interval, state, q) = pis_inner(
        &angles,
        u,
        chi.amplitudes().clone(),
        interval,
        transition,
        iterations,
        1,
        readout,
    );
    Ok(PisOutcome {
        interval,
        state: StateVector::normalized(state)?,
        queries: QueryCounter { controlled_u_applications: q },
    })
}

fn check_state_dim(u: &ComplexMatrix, chi: &StateVector) -> Result<()> {
    if chi.dim() != u.nrows() {
        return Err(Error::contract(format!(
            "state dimension {} does not match unitary dimension {}",
            chi.dim(),
            u.nrows()
        )));
    }
    Ok(())
}

/// Result of a phase search run.
#[derive(Debug, Clone)]
pub struct QpsOutcome {
    pub estimate: f64,
    pub queries: QueryCounter,
    /// System state at the end of the run.
    pub state: StateVector,
    /// Midpoints `ζ_m^{(t)}` of every round.
    pub midpoints: Vec<f64>,
}

/// Phase search with the classifier built once and reused across runs.
#[derive(Debug, Clone)]
pub struct PhaseSearch {
    config: QpsConfig,
    angles: AngleSet,
}

impl PhaseSearch {
    pub fn new(config: QpsConfig) -> Result<Self> {
        let angles = classifier_angles(config.transition, config.per_measurement_eps())?;
        Ok(Self { config, angles })
    }

    pub fn config(&self) -> &QpsConfig {
        &self.config
    }

    /// Layers of the classifier circuit.
    pub fn classifier_layers(&self) -> usize {
        self.angles.layers()
    }

    /// Qubits used beyond the system register.
    pub fn ancilla_qubits(&self) -> usize {
        crate::qpp::ANCILLA_QUBITS
    }

    pub fn run<R: Rng>(&self, u: &ComplexMatrix, chi: &StateVector, rng: &mut R) -> Result<QpsOutcome> {
        self.run_with(u, chi, &mut Readout::Sample(rng))
    }

    pub fn run_with(
        &self,
        u: &ComplexMatrix,
        chi: &StateVector,
        readout: &mut Readout<'_>,
    ) -> Result<QpsOutcome> {
        check_unitary(u)?;
        check_state_dim(u, chi)?;
        let cfg = &self.config;
        let d = cfg.amplification();
        let q = cfg.iterations();
        let mut current = u.clone();
        let mut interval = PhaseInterval::full();
        let mut state = chi.amplitudes().clone();
        let mut queries = QueryCounter::default();
        let mut midpoints = Vec::with_capacity(cfg.rounds());
        let mut weight = 1u64;
        for t in 0..cfg.rounds() {
            let (iv, st, used) = pis_inner(
                &self.angles,
                &current,
                state,
                interval,
                cfg.transition,
                q,
                weight,
                readout,
            );
            state = st;
            queries.add(used);
            let mid = iv.mid();
            midpoints.push(mid);
            if t + 1 < cfg.rounds() {
                current = matrix_power(&(&current * C64::from_polar(1.0, -mid)), d);
                interval = PhaseInterval {
                    lo: d as f64 * (iv.lo - mid),
                    hi: d as f64 * (iv.hi - mid),
                };
                weight = weight.saturating_mul(d);
            }
        }
        let estimate = midpoints
            .iter()
            .enumerate()
            .map(|(t, z)| z / (d as f64).powi(t as i32))
            .sum();
        Ok(QpsOutcome {
            estimate,
            queries,
            state: StateVector::normalized(state)?,
            midpoints,
        })
    }
}

/// One phase search run; see [`PhaseSearch`] for repeated use.
pub fn quantum_phase_search<R: Rng>(
    u: &ComplexMatrix,
    chi: &StateVector,
    config: QpsConfig,
    rng: &mut R,
) -> Result<QpsOutcome> {
    PhaseSearch::new(config)?.run(u, chi, rng)
}

/// Distance between two phases on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Multiplicative order by direct search.
pub fn classical_order(x: u64, n: u64) -> Option<u64> {
    if gcd(x, n) != 1 {
        return None;
    }
    (1..=n).find(|&r| mod_pow(x, r, n) == 1)
}

/// Largest modulus accepted by [`period_finding`].
pub const MAX_MODULUS: u64 = 64;

/// `U_x|y⟩ = |xy mod N⟩` for `y < N`, identity on the padding states.
pub fn modular_multiplier(x: u64, n: u64) -> Result<ComplexMatrix> {
    if n < 2 || n > MAX_MODULUS {
        return Err(Error::contract(format!("modulus {n} must lie in [2, {MAX_MODULUS}]")));
    }
    if gcd(x % n, n) != 1 {
        return Err(Error::contract(format!("gcd({x}, {n}) ≠ 1")));
    }
    let dim = (n as usize).next_power_of_two();
    let mut u = ComplexMatrix::zeros(dim, dim);
    for y in 0..dim {
        let img = if (y as u64) < n { (x * y as u64 % n) as usize } else { y };
        u[(img, y)] = c(1.0, 0.0);
    }
    Ok(u)
}

/// Denominator of the last continued-fraction convergent of `v ∈ [0, 1)`
/// whose denominator does not exceed `cap`.
pub fn continued_fraction_denominator(v: f64, cap: u64) -> u64 {
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut x = v;
    for _ in 0..64 {
        let frac = x - x.floor();
        if frac < 1e-9 {
            break;
        }
        x = 1.0 / frac;
        if x > 1e12 {
            break;
        }
        let k_next = x.floor() as u64 * k + k_prev;
        if k_next > cap {
            break;
        }
        (k_prev, k) = (k, k_next);
    }
    k
}

/// Result of period finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodOutcome {
    pub order: Option<u64>,
    pub attempts: usize,
    pub queries: u64,
    pub estimates: Vec<f64>,
}

/// Retry budget for period finding.
pub const PERIOD_ATTEMPTS: usize = 10;

/// Default configuration for period finding modulo `n`: precision `1/N²`.
pub fn period_config(n: u64, eps: f64) -> Result<QpsConfig> {
    QpsConfig::with_defaults(eps, 1.0 / (n * n) as f64)
}

/// Order of `x` modulo `n` from phase search on `U_x` with input `|1⟩`.
///
/// Each attempt reads a fraction `s/r`; denominators from successive attempts
/// are combined by least common multiple until `x^r ≡ 1`.
pub fn period_finding<R: Rng>(x: u64, n: u64, config: QpsConfig, rng: &mut R) -> Result<PeriodOutcome> {
    let u = modular_multiplier(x, n)?;
    let one = StateVector::basis(u.nrows(), 1)?;
    let search = PhaseSearch::new(config)?;
    let mut r = 1u64;
    let mut queries = 0u64;
    let mut estimates = Vec::new();
    if mod_pow(x, 1, n) == 1 {
        return Ok(PeriodOutcome { order: Some(1), attempts: 0, queries, estimates });
    }
    for attempt in 1..=PERIOD_ATTEMPTS {
        let out = search.run(&u, &one, rng)?;
        queries = queries.saturating_add(out.queries.controlled_u_applications);
        estimates.push(out.estimate);
        let frac = (out.estimate / (2.0 * PI)).rem_euclid(1.0);
        let den = continued_fraction_denominator(frac, n);
        r = lcm(r, den);
        if r > n {
            r = 1;
            continue;
        }
        if mod_pow(x, r, n) == 1 {
            return Ok(PeriodOutcome { order: Some(r), attempts: attempt, queries, estimates });
        }
    }
    Ok(PeriodOutcome { order: None, attempts: PERIOD_ATTEMPTS, queries, estimates })
}

/// Grover operator `A(2|0⟩⟨0| − I)A† · ((I − 2|1⟩⟨1|) ⊗ I)`.
pub fn grover_operator(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_unitary(a)?;
    let dim = a.nrows();
    let half = dim / 2;
    let mut refl0 = -identity(dim);
    refl0[(0, 0)] = c(1.0, 0.0);
    let mut flip = identity(dim);
    for i in half..dim {
        flip[(i, i)] = c(-1.0, 0.0);
    }
    Ok(a * refl0 * a.adjoint() * flip)
}

/// Result of amplitude estimation.
#[derive(Debug, Clone)]
pub struct AmplitudeOutcome {
    /// Estimate of `|sin τ|`.
    pub amplitude: f64,
    pub phase: f64,
    pub queries: QueryCounter,
}

/// Estimates `|sin τ|` for `A|0⟩ = cos τ|0⟩|ψ⟩ + sin τ|1⟩|φ⟩`.
pub fn amplitude_estimation<R: Rng>(
    a: &ComplexMatrix,
    config: QpsConfig,
    rng: &mut R,
) -> Result<AmplitudeOutcome> {
    let g = grover_operator(a)?;
    let chi = StateVector::normalized(a.column(0).into_owned())?;
    let out = quantum_phase_search(&g, &chi, config, rng)?;
    Ok(AmplitudeOutcome {
        amplitude: (0.5 * out.estimate).sin().abs(),
        phase: out.estimate,
        queries: out.queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rng_from_seed;

    fn diag_phase(tau: f64) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), C64::from_polar(1.0, tau)]))
    }

    #[test]
    fn derived_quantities() {
        let cfg = QpsConfig::with_defaults(0.1, 1e-4).unwrap();
        assert_eq!(cfg.iterations(), 4);
        assert_eq!(cfg.amplification(), 2);
        assert_eq!(cfg.rounds(), 14);
    }

    #[test]
    fn classifier_separates_half_planes() {
        let eps = 1e-3;
        let circ = classifier_circuit(0.3, eps, &diag_phase(PI / 2.0)).unwrap();
        let psi = StateVector::basis(2, 1).unwrap().with_zero_ancilla();
        let out = circ.apply(&psi).unwrap();
        assert!(out.probability_one(0).unwrap() <= eps);
        let circ = classifier_circuit(0.3, eps, &diag_phase(-PI / 2.0)).unwrap();
        let out = circ.apply(&psi).unwrap();
        assert!(out.probability_one(0).unwrap() >= 1.0 - eps);
    }

    #[test]
    fn single_wide_step_width() {
        let iv = update_interval(PhaseInterval::full(), 0.3, 0);
        assert!((iv.width() - (PI + 0.6)).abs() < 1e-12);
    }

    #[test]
    fn identity_gives_zero_phase() {
        let cfg = QpsConfig::with_defaults(0.1, 1e-3).unwrap();
        let chi = StateVector::basis(2, 0).unwrap();
        let out = quantum_phase_search(&identity(2), &chi, cfg, &mut rng_from_seed(5)).unwrap();
        assert!(circular_distance(out.estimate, 0.0) < 1e-3);
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(continued_fraction_denominator(0.25 + 1e-5, 15), 4);
        assert_eq!(continued_fraction_denominator(0.75 - 1e-5, 15), 4);
        assert_eq!(continued_fraction_denominator(0.5, 15), 2);
        assert_eq!(continued_fraction_denominator(0.0, 15), 1);
    }

    #[test]
    fn small_orders() {
        let cfg = period_config(5, 0.1).unwrap();
        let out = period_finding(4, 5, cfg, &mut rng_from_seed(1)).unwrap();
        assert_eq!(out.order, Some(2));
        let out = period_finding(1, 7, period_config(7, 0.1).unwrap(), &mut rng_from_seed(1)).unwrap();
        assert_eq!(out.order, Some(1));
    }
}
