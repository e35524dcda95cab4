//! Subcommand arguments and their execution.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qppkit::approx::{
    compose_cosine, fractional_monomial_poly, fractional_monomial_scale, jacobi_anger, jacobi_anger_error,
    log_poly, power_poly, square_wave, square_wave_error, RealPoly,
};
use qppkit::entropy::{EntropyEstimator, EntropyKind, Mode};
use qppkit::hamsim::{simulate, SimRequest};
use qppkit::linalg::{gates, rng_from_seed, spectral_norm};
use qppkit::phasesearch::{
    amplitude_estimation, circular_distance, classical_order, period_config, period_finding, PhaseSearch,
    QpsConfig,
};
use qppkit::qsp::{angles_for_expectation, angles_for_projection, expectation_error, projection_error};
use qppkit::{ComplexMatrix, LaurentPoly, StateVector, C64};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::io::{load_density, load_hermitian, load_unitary};
use crate::parse::{parse_list, parse_phase};
use crate::Report;

/// Comma-separated numbers, parsed as one argument.
#[derive(Debug, Clone)]
pub struct List(pub Vec<f64>);

fn parse_list_arg(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

fn fields(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("reports are built from object literals"),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `(−π, π]` representative of a phase.
fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    SquareWave,
    JacobiAnger,
    Log,
    Power,
    Fractional,
}

/// Parameters of a named approximant.
#[derive(Debug, Clone, Args)]
pub struct ApproxSpec {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Square wave transition half-width.
    #[arg(long, value_parser = parse_phase)]
    pub transition: Option<f64>,
    /// Approximation error.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Jacobi–Anger evolution time.
    #[arg(long, value_parser = parse_phase)]
    pub time: Option<f64>,
    /// Jacobi–Anger precision.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Lower end of the approximation interval.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Exponent `c` of the power family or `s` of the fractional family.
    #[arg(long)]
    pub exponent: Option<f64>,
}

enum Approximant {
    Laurent(LaurentPoly),
    Real(RealPoly),
}

fn need(v: Option<f64>, name: &str, family: &str) -> CliResult<f64> {
    v.ok_or_else(|| usage(format!("--{name} is required for the {family} family")))
}

fn build_approximant(spec: &ApproxSpec) -> CliResult<(Approximant, f64)> {
    let family = spec.family.ok_or_else(|| usage("--family is required"))?;
    Ok(match family {
        Family::SquareWave => {
            let d = need(spec.transition, "transition", "square-wave")?;
            let f = square_wave(d, need(spec.eps, "eps", "square-wave")?)?;
            let err = square_wave_error(&f, d);
            (Approximant::Laurent(f), err)
        }
        Family::JacobiAnger => {
            let t = need(spec.time, "time", "jacobi-anger")?;
            let f = jacobi_anger(t, need(spec.delta, "delta", "jacobi-anger")?)?;
            let err = jacobi_anger_error(&f, t);
            (Approximant::Laurent(f), err)
        }
        Family::Log => {
            let g = need(spec.gamma, "gamma", "log")?;
            let p = log_poly(g, need(spec.eps, "eps", "log")?)?;
            let s = 1.0 / (2.0 * g.ln());
            let err = p.max_error_on(g, 1.0, |x| x.ln() * s);
            (Approximant::Real(p), err)
        }
        Family::Power => {
            let g = need(spec.gamma, "gamma", "power")?;
            let c = need(spec.exponent, "exponent", "power")?;
            let p = power_poly(c, g, need(spec.eps, "eps", "power")?)?;
            let pre = 0.5 * g.powf(c);
            let err = p.max_error_on(g, 1.0, |x| pre * x.powf(-c));
            (Approximant::Real(p), err)
        }
        Family::Fractional => {
            let g = need(spec.gamma, "gamma", "fractional")?;
            let s = need(spec.exponent, "exponent", "fractional")?;
            let p = fractional_monomial_poly(s, g, need(spec.eps, "eps", "fractional")?)?;
            let scale = fractional_monomial_scale(g);
            let err = p.max_error_on(g, 1.0, |x| x.powf(s) / scale);
            (Approximant::Real(p), err)
        }
    })
}

fn approximant_json(a: &Approximant) -> Value {
    match a {
        Approximant::Laurent(f) => json!({
            "basis": "laurent-half",
            "degree": f.degree(),
            "parity": f.parity(),
            "coefficients": f.coefficients().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        }),
        Approximant::Real(p) => {
            let mut v = serde_json::to_value(p).expect("polynomials serialize");
            v["degree"] = json!(p.degree());
            v
        }
    }
}

fn approximant_from_json(v: &Value, path: &str) -> CliResult<Approximant> {
    match v.get("basis").and_then(Value::as_str) {
        Some("laurent-half") => {
            let parity = v.get("parity").and_then(Value::as_u64).unwrap_or(0) as u8;
            let coeffs: Vec<[f64; 2]> = serde_json::from_value(v["coefficients"].clone())
                .map_err(|e| CliError::format(path, e))?;
            let coeffs = coeffs.into_iter().map(|[re, im]| C64::new(re, im)).collect();
            Ok(Approximant::Laurent(LaurentPoly::from_dense(coeffs, parity)?))
        }
        Some(_) => Ok(Approximant::Real(
            serde_json::from_value(v.clone()).map_err(|e| CliError::format(path, e))?,
        )),
        None => Err(CliError::format(path, "missing 'basis'")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub spec: ApproxSpec,
}

pub fn approx(a: &ApproxArgs) -> CliResult<Report> {
    let (poly, err) = build_approximant(&a.spec)?;
    let family = a.spec.family.and_then(|f| f.to_possible_value()).map(|v| v.get_name().to_string());
    Ok(Report {
        fields: fields(json!({
            "family": family,
            "approximant": approximant_json(&poly),
            "grid_error": err,
        })),
        ..Report::default()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// `⟨0|W|0⟩` realizes the polynomial.
    Projection,
    /// `|P|² − |Q|²` realizes the polynomial.
    Expectation,
}

#[derive(Debug, Clone, Args)]
pub struct AnglesArgs {
    /// Approximant JSON written by `approx`.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub spec: ApproxSpec,
    #[arg(long, value_enum, default_value_t = Target::Projection)]
    pub target: Target,
}

pub fn angles(a: &AnglesArgs) -> CliResult<Report> {
    let poly = match &a.input {
        Some(path) => {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(&shown, e))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::format(&shown, e))?;
            // Accept either a bare approximant or an `approx` artifact.
            let inner = v.get("approximant").unwrap_or(&v);
            approximant_from_json(inner, &shown)?
        }
        None => build_approximant(&a.spec)?.0,
    };
    let f = match poly {
        Approximant::Laurent(f) => f,
        Approximant::Real(p) => compose_cosine(&p),
    };
    let (set, err) = match a.target {
        Target::Projection => {
            let s = angles_for_projection(&f)?;
            let e = projection_error(&s, &f);
            (s, e)
        }
        Target::Expectation => {
            let s = angles_for_expectation(&f)?;
            let e = expectation_error(&s, &f);
            (s, e)
        }
    };
    let layers = set.layers();
    Ok(Report {
        fields: fields(json!({
            "angles": set,
            "layers": layers,
            "target": format!("{:?}", a.target).to_lowercase(),
            "round_trip_error": err,
        })),
        query_count: layers as u64,
        ..Report::default()
    })
}

#[derive(Debug, Clone, Args)]
pub struct QpsArgs {
    /// Phase of `U = diag(1, e^{iτ})`, searched from `|1⟩`.
    #[arg(long, value_parser = parse_phase, conflicts_with = "unitary")]
    pub tau: Option<f64>,
    /// Unitary file; the search starts from a computational basis state.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub basis_state: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Failure probability budget.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = qppkit::phasesearch::DEFAULT_TRANSITION)]
    pub transition: f64,
    /// Comma-separated precisions; emits one row per value.
    #[arg(long, value_parser = parse_list_arg)]
    pub sweep_delta: Option<List>,
}

pub fn qps(a: &QpsArgs, seed: u64) -> CliResult<Report> {
    let (u, chi) = match (a.tau, &a.unitary) {
        (Some(tau), _) => {
            let mut u = ComplexMatrix::identity(2, 2);
            u[(1, 1)] = C64::from_polar(1.0, tau);
            (u, StateVector::basis(2, 1)?)
        }
        (None, Some(path)) => {
            let u = load_unitary(path)?;
            let chi = StateVector::basis(u.nrows(), a.basis_state)?;
            (u, chi)
        }
        (None, None) => return Err(usage("one of --tau or --unitary is required")),
    };
    let mut rng = rng_from_seed(seed);
    let deltas = a.sweep_delta.as_ref().map_or(vec![a.delta], |l| l.0.clone());
    let mut rows = Vec::new();
    let mut total = 0u64;
    for &delta in &deltas {
        let cfg = QpsConfig::new(a.transition, a.eps, delta)?;
        let search = PhaseSearch::new(cfg)?;
        let out = search.run(&u, &chi, &mut rng)?;
        let q = out.queries.controlled_u_applications;
        total += q;
        let estimate = wrap(out.estimate);
        let error = a.tau.map(|t| circular_distance(estimate, t));
        rows.push(fields(json!({
            "delta": delta,
            "estimate": estimate,
            "queries": q,
            "error": error,
            "success": error.map(|e| e <= delta),
            "rounds": cfg.rounds(),
            "iterations": cfg.iterations(),
            "amplification": cfg.amplification(),
            "classifier_layers": search.classifier_layers(),
            "ancilla_qubits": search.ancilla_qubits(),
        })));
    }
    Ok(if a.sweep_delta.is_some() {
        Report { rows, query_count: total, ..Report::default() }
    } else {
        let mut f = rows.pop().expect("one row");
        f.insert("tau".into(), json!(a.tau));
        Report { fields: f, query_count: total, ..Report::default() }
    })
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    #[arg(long)]
    pub x: u64,
    /// Modulus.
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

pub fn period(a: &PeriodArgs, seed: u64) -> CliResult<Report> {
    let cfg = period_config(a.n, a.eps)?;
    let out = period_finding(a.x, a.n, cfg, &mut rng_from_seed(seed))?;
    let expected = classical_order(a.x, a.n);
    Ok(Report {
        fields: fields(json!({
            "x": a.x,
            "n": a.n,
            "order": out.order,
            "expected": expected,
            "success": out.order.is_some() && out.order == expected,
            "attempts": out.attempts,
            "queries": out.queries,
            "estimates": out.estimates,
        })),
        query_count: out.queries,
        ..Report::default()
    })
}

#[derive(Debug, Clone, Args)]
pub struct QaeArgs {
    /// Prepare `A|0⟩ = √(1−a²)|0⟩ + a|1⟩` on one qubit.
    #[arg(long, conflicts_with = "unitary")]
    pub amplitude: Option<f64>,
    /// Preparation unitary; the good subspace has the top qubit set.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

pub fn qae(a: &QaeArgs, seed: u64) -> CliResult<Report> {
    let prep = match (a.amplitude, &a.unitary) {
        (Some(amp), _) => {
            if !(0.0..=1.0).contains(&amp) {
                return Err(usage("--amplitude must lie in [0, 1]"));
            }
            gates::ry(2.0 * amp.asin())
        }
        (None, Some(path)) => load_unitary(path)?,
        (None, None) => return Err(usage("one of --amplitude or --unitary is required")),
    };
    let cfg = QpsConfig::with_defaults(a.eps, a.delta)?;
    let out = amplitude_estimation(&prep, cfg, &mut rng_from_seed(seed))?;
    let q = out.queries.controlled_u_applications;
    let error = a.amplitude.map(|t| (out.amplitude - t).abs());
    Ok(Report {
        fields: fields(json!({
            "estimate": out.amplitude,
            "phase": out.phase,
            "queries": q,
            "amplitude": a.amplitude,
            "error": error,
            "success": error.map(|e| e <= 2.0 * a.delta),
        })),
        query_count: q,
        ..Report::default()
    })
}

#[derive(Debug, Clone, Args)]
pub struct HamsimArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long, value_parser = parse_phase, required_unless_present = "sweep_time")]
    pub time: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Normalization; defaults to the spectral norm.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated times; emits one row per value.
    #[arg(long, value_parser = parse_list_arg)]
    pub sweep_time: Option<List>,
}

pub fn hamsim(a: &HamsimArgs) -> CliResult<Report> {
    let h = load_hermitian(&a.hamiltonian)?;
    let lambda = a.lambda.unwrap_or_else(|| spectral_norm(&h));
    let times = match (&a.sweep_time, a.time) {
        (Some(l), _) => l.0.clone(),
        (None, Some(t)) => vec![t],
        (None, None) => return Err(usage("--time is required")),
    };
    let mut rows = Vec::new();
    let mut total = 0u64;
    for &t in &times {
        let req = SimRequest { hamiltonian: h.clone(), lambda, time: t, delta: a.delta };
        let out = simulate(&req)?;
        total += out.queries as u64;
        let mut row = fields(serde_json::to_value(&out).expect("outcome serializes"));
        row.insert("time".into(), json!(t));
        row.insert("lambda".into(), json!(lambda));
        row.insert("delta".into(), json!(a.delta));
        rows.push(row);
    }
    Ok(if a.sweep_time.is_some() {
        Report { rows, query_count: total, ..Report::default() }
    } else {
        Report { fields: rows.pop().expect("one row"), query_count: total, ..Report::default() }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    VonNeumann,
    Relative,
    Renyi,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Rényi order.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Lower bound on the nonzero eigenvalues.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Rank bound.
    #[arg(long)]
    pub kappa: Option<usize>,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    /// Density matrix file.
    #[arg(long)]
    pub state: PathBuf,
    /// Second density matrix for the relative entropy.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Sample the ancilla this many times.
    #[arg(long, conflicts_with_all = ["exact", "adaptive", "qae_delta"])]
    pub shots: Option<u64>,
    /// Dense ancilla expectation (the default).
    #[arg(long)]
    pub exact: bool,
    /// Double the shot count until the target half-width is met.
    #[arg(long, conflicts_with_all = ["exact", "qae_delta"])]
    pub adaptive: bool,
    /// Amplitude estimation of the ancilla probability to this precision.
    #[arg(long, conflicts_with = "exact")]
    pub qae_delta: Option<f64>,
}

pub fn entropy(a: &EntropyArgs, seed: u64) -> CliResult<Report> {
    let kind = match a.kind {
        Kind::VonNeumann => EntropyKind::VonNeumann,
        Kind::Relative => EntropyKind::Relative,
        Kind::Renyi => EntropyKind::Renyi {
            alpha: a.alpha.ok_or_else(|| usage("--alpha is required for the renyi kind"))?,
        },
    };
    let mode = match (a.shots, a.adaptive, a.qae_delta) {
        (Some(n), _, _) => Mode::Shots(n),
        (None, true, _) => Mode::Adaptive,
        (None, false, Some(d)) => Mode::AmplitudeEstimation { delta: d },
        _ => Mode::Exact,
    };
    let rho = load_density(&a.state)?;
    let sigma = match (&a.sigma, kind) {
        (Some(p), EntropyKind::Relative) => Some(load_density(p)?),
        (None, EntropyKind::Relative) => return Err(usage("--sigma is required for the relative kind")),
        (Some(_), _) => return Err(usage("--sigma only applies to the relative kind")),
        (None, _) => None,
    };
    let est = EntropyEstimator::new(kind, a.gamma, a.kappa, a.eps)?;
    let out = est.estimate(&rho, sigma.as_ref(), mode, seed)?;
    let divergent = out.estimate.is_infinite();
    Ok(Report {
        fields: fields(json!({
            "kind": a.kind.to_possible_value().map(|v| v.get_name().to_string()),
            "alpha": a.alpha,
            "estimate": if divergent { Value::Null } else { json!(out.estimate) },
            "divergent": divergent,
            "half_width": out.half_width,
            "shots_used": out.shots_used,
            "queries": out.queries,
            "expectations": out.expectations,
            "measured_qubits": out.measured_qubits,
            "gamma_used": est.gamma(),
            "polynomial_degree": est.polynomial().degree(),
            "warnings": out.warnings,
        })),
        query_count: out.queries,
        ..Report::default()
    })
}
