//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use oio_core::cutoff::{bump, SmoothCutoff};
use oio_core::exponents::{endpoint_estimate, fractional_mapping, l2_decay_exponent, pitt_exponents, sharp_lp_range};
use oio_core::factor::{analyze_damping, classify_phase, factor_hessian, HessianFactorization};
use oio_core::newton::reduced_newton_polyhedron;
use oio_core::quadrature::{vdc_check, QuadratureOptions};
use oio_core::rational::{self, int, to_f64};
use oio_core::{BivariatePolynomial, HomogeneousPhase};
use serde::Serialize;
use serde_json::{json, Value};

use crate::atoms::{atom_uniformity_experiment, standard_cubes, SingularKernel};
use crate::config::ExperimentConfig;
use crate::decay::{decay_fit, dyadic_ladder, DecayOptions, Estimator};
use crate::error::{LabError, Result};
use crate::fractional::{scaling_sweep, FractionalKernel, INTERPRETATION};
use crate::operator::ResolutionPolicy;
use crate::pitt::pitt_sweep;
use crate::report::{ladder_csv, write_atomic, Envelope};
use crate::suite::{run_suite, SuiteOptions};
use crate::witness::unboundedness_witness;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ASSERT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "oio", version, about = "Oscillatory integral operators: exact phase analysis and numerical decay experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree, sharp range, Newton vertices, Hessian factorization and damping of a phase.
    Analyze(Flags),
    /// Hessian factorization only.
    Factor(Flags),
    /// Reduced Newton polyhedron and endpoint exponents.
    Newton(Flags),
    /// Operator-norm decay along a dyadic λ ladder (JSON and CSV).
    Decay(Flags),
    /// van der Corput scaling of a one-variable oscillatory integral.
    Vdc(Flags),
    /// L¹ uniformity of twisted atoms.
    Atoms(Flags),
    /// Pitt exponent predicate, one case or the exhaustive grid.
    Pitt(Flags),
    /// Dilation sweep for fractional integrals.
    Fractional(Flags),
    /// Growth of the undamped witness operator.
    Witness(Flags),
    /// All acceptance criteria.
    Suite(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Analyze(f) => ("analyze", f),
            Command::Factor(f) => ("factor", f),
            Command::Newton(f) => ("newton", f),
            Command::Decay(f) => ("decay", f),
            Command::Vdc(f) => ("vdc", f),
            Command::Atoms(f) => ("atoms", f),
            Command::Pitt(f) => ("pitt", f),
            Command::Fractional(f) => ("fractional", f),
            Command::Witness(f) => ("witness", f),
            Command::Suite(f) => ("suite", f),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub phase: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    /// Base-2 exponent of the smallest λ.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_lo: Option<i32>,
    /// Base-2 exponent of the largest λ.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_hi: Option<i32>,
    #[arg(long)]
    pub steps: Option<i32>,
    #[arg(long)]
    pub res_cap: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Exit with status 3 when the measured value misses its target.
    #[arg(long)]
    pub assert: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Extra `key=value` settings, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Flags {
    pub fn resolve(&self, command: &str) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_text(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(cmd) = &c.command {
            if cmd != command {
                return Err(LabError::Invalid(format!("config is for {cmd:?}, not {command:?}")));
            }
        }
        c.command = Some(command.to_string());
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| LabError::Invalid(format!("--set needs key=value, got {kv:?}")))?;
            c.set(&k.trim().replace('-', "_"), v.trim())?;
        }
        let text = |v: &Option<String>| v.clone();
        if let Some(v) = text(&self.phase) {
            c.set("phase", &v)?;
        }
        if let Some(v) = text(&self.p) {
            c.set("p", &v)?;
        }
        if let Some(v) = self.lambda_lo {
            c.lambda_lo = v;
        }
        if let Some(v) = self.lambda_hi {
            c.lambda_hi = v;
        }
        if let Some(v) = self.steps {
            c.steps = v;
        }
        if let Some(v) = self.res_cap {
            c.res_cap = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if self.assert {
            c.assert = true;
        }
        if let Some(v) = &self.out {
            c.out = Some(v.clone());
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.validate()?;
        Ok(c)
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: Value,
    pub csv: Option<String>,
    /// `Some(false)` when an asserted target was missed.
    pub passed: Option<bool>,
    /// Human-readable lines for stdout.
    pub notes: Vec<String>,
}

impl Outcome {
    fn new<T: Serialize>(result: &T) -> Result<Self> {
        Ok(Self { result: serde_json::to_value(result)?, csv: None, passed: None, notes: Vec::new() })
    }
}

fn phase_of(c: &ExperimentConfig) -> Result<HomogeneousPhase> {
    let text = c.phase.as_deref().ok_or_else(|| LabError::Invalid("--phase is required".into()))?;
    Ok(HomogeneousPhase::parse(text)?)
}

fn nondegenerate(c: &ExperimentConfig) -> Result<HomogeneousPhase> {
    let s = phase_of(c)?;
    s.k_extremes()?;
    Ok(s)
}

fn factorization_json(f: &HessianFactorization) -> Value {
    let r = rational::to_text;
    json!({
        "c": r(&f.leading_c),
        "gamma": f.gamma,
        "beta": f.beta,
        "linear": f.linear.iter().map(|l| json!({
            "factor": l.factor.to_string(),
            "interval": [r(&l.lo), r(&l.hi)],
            "approx": l.to_f64(),
            "multiplicity": l.multiplicity,
        })).collect::<Vec<_>>(),
        "quadratics": f.quadratics.iter().map(|q| json!({ "b": r(&q.b), "c": r(&q.c), "multiplicity": q.multiplicity })).collect::<Vec<_>>(),
        "certificates": f.certified.iter().map(|q| json!({ "factor": q.factor.to_string(), "degree": q.degree, "real_roots": q.real_roots, "sturm_verified": q.verify(), "multiplicity": q.multiplicity })).collect::<Vec<_>>(),
        "reconstructs": true,
        "degree_bookkeeping": f.degree_bookkeeping_holds(),
    })
}

fn cmd_factor(c: &ExperimentConfig) -> Result<Outcome> {
    let s = nondegenerate(c)?;
    let f = factor_hessian(&s)?;
    let mut v = factorization_json(&f);
    v["reconstructs"] = json!(f.reconstruct() == s.mixed_hessian());
    v["hessian"] = json!(s.mixed_hessian().to_string());
    v["case"] = json!(classify_phase(&f, s.degree()).name());
    Outcome::new(&json!({ "phase": s.to_string(), "factorization": v }))
}

fn newton_json(s: &HomogeneousPhase) -> Result<Value> {
    let poly = reduced_newton_polyhedron(&s.to_polynomial())?;
    let vertices: Vec<Value> = poly
        .vertices()
        .iter()
        .map(|&(i, j)| {
            let (p, d) = endpoint_estimate(i, j).map(|(p, d)| (rational::to_text(&p), rational::to_text(&d))).unwrap_or_default();
            json!({ "x_exponent": i, "y_exponent": j, "p": p, "decay": d })
        })
        .collect();
    Ok(json!(vertices))
}

fn cmd_newton(c: &ExperimentConfig) -> Result<Outcome> {
    let s = nondegenerate(c)?;
    Outcome::new(&json!({ "phase": s.to_string(), "newton_vertices": newton_json(&s)? }))
}

fn cmd_analyze(c: &ExperimentConfig) -> Result<Outcome> {
    let s = nondegenerate(c)?;
    let (k_min, k_max) = s.k_extremes()?;
    let range = sharp_lp_range(&s)?;
    let r = rational::to_text;
    let mut v = json!({
        "phase": s.to_string(),
        "n": s.degree(),
        "k_min": k_min,
        "k_max": k_max,
        "lp_range": [r(&range.p_lo), r(&range.p_hi)],
        "l2_decay": r(&l2_decay_exponent(&s)?),
        "newton_vertices": newton_json(&s)?,
        "factorization": Value::Null,
        "hessian_case": Value::Null,
        "damping": Value::Null,
    });
    // Degree two has a constant Hessian and nothing to factor or damp.
    if s.degree() >= 3 {
        let (f, case, d) = analyze_damping(&s)?;
        let mut fj = factorization_json(&f);
        fj["reconstructs"] = json!(f.reconstruct() == s.mixed_hessian());
        v["factorization"] = fj;
        v["hessian_case"] = json!(case.name());
        v["damping"] = json!({ "D": d.factor.description(), "re_z": r(&d.re_z), "decay": r(&d.decay_exponent), "beta": d.beta });
    }
    Outcome::new(&v)
}

/// Default upper end of a λ ladder, as a base-2 exponent.
pub const LAMBDA_CAP_EXP: i32 = 16;

fn ladder(c: &ExperimentConfig) -> Result<Vec<f64>> {
    let cap = c.extra_f64("lambda_cap", LAMBDA_CAP_EXP as f64)? as i32;
    if c.lambda_hi > cap {
        return Err(LabError::LambdaCap { exp: c.lambda_hi, cap });
    }
    dyadic_ladder(c.lambda_lo, c.lambda_hi, c.steps)
}

fn cmd_decay(c: &ExperimentConfig) -> Result<Outcome> {
    let s = nondegenerate(c)?;
    let radius = c.extra_f64("radius", 0.875)?;
    let cutoff = match c.extra("cutoff").unwrap_or("bump") {
        "bump" => SmoothCutoff::tensor_bump((0.0, 0.0), (radius, radius)),
        "plateau" => SmoothCutoff::tensor_plateau((0.0, 0.0), (radius, radius)),
        other => return Err(LabError::Invalid(format!("cutoff {other:?}: expected bump or plateau"))),
    };
    let damping = if c.extra_bool("damped", false)? { Some(analyze_damping(&s)?.2) } else { None };
    let estimator = match c.extra("estimator") {
        Some("singular_value") => Estimator::SingularValue,
        Some("trial_lower_bound") => Estimator::TrialLowerBound,
        Some(other) => return Err(LabError::Invalid(format!("estimator {other:?}: expected singular_value or trial_lower_bound"))),
        None if c.p == int(2) => Estimator::SingularValue,
        None => Estimator::TrialLowerBound,
    };
    let policy = ResolutionPolicy { cap: c.res_cap, ..ResolutionPolicy::default() };
    let options = DecayOptions { estimator, policy, tol: 1e-6, z_im: c.extra_f64("z_im", 0.0)? };
    let r = decay_fit(&s, &c.p, damping.as_ref(), &ladder(c)?, &cutoff, &options)?;
    let mut o = Outcome::new(&r)?;
    o.csv = Some(ladder_csv(&r.ladder_rows()));
    o.notes.push(format!(
        "slope {:.6} ± {:.6}, theory {}",
        r.slope,
        r.stderr,
        r.theory_slope.as_ref().map(rational::to_text).unwrap_or_else(|| "none".into())
    ));
    o.passed = c.assert.then(|| r.agrees_with_theory(c.tol));
    Ok(o)
}

fn cmd_vdc(c: &ExperimentConfig) -> Result<Outcome> {
    let text = c.phase.as_deref().unwrap_or("x^2");
    let poly = BivariatePolynomial::parse(text)?;
    if poly.terms().any(|(&(_, j), _)| j > 0) {
        return Err(LabError::Invalid("vdc phases are polynomials in x alone".into()));
    }
    let f = poly.to_f64_terms();
    let k = c.extra_u32("k", poly.total_degree().unwrap_or(1).max(1))?;
    let amp = |t: f64| std::f64::consts::E * bump(t, 0.0, 1.0);
    let lambdas = ladder(c)?;
    let r = vdc_check(|t| f.eval(t, 0.0), k, &lambdas, amp, (0.0, 1.0), 1e-11, QuadratureOptions::default())?;
    // For φ = a tᵏ with unit amplitude at 0, λ^{1/k}|I(λ)| → Γ(1 + 1/k) |a|^{−1/k}.
    let oracle = match poly.terms().collect::<Vec<_>>().as_slice() {
        [(&(i, 0), a)] if i == k => Some(libm::tgamma(1.0 + 1.0 / k as f64) * to_f64(a).abs().powf(-1.0 / k as f64)),
        _ => None,
    };
    let last = *lambdas.last().unwrap_or(&1.0);
    let deviation = oracle.map(|o| {
        lambdas.iter().zip(&r.scaled).filter(|(l, _)| **l * 10.0 >= last).map(|(_, s)| (s / o - 1.0).abs()).fold(0.0, f64::max)
    });
    let mut o = Outcome::new(&json!({
        "phase": poly.to_string(),
        "k": k,
        "lambdas": r.lambdas,
        "scaled": r.scaled,
        "sup": r.sup,
        "terminal_variation": r.terminal_variation,
        "oracle": oracle,
        "terminal_deviation": deviation,
    }))?;
    o.passed = c.assert.then(|| deviation.unwrap_or(r.terminal_variation) <= c.tol);
    Ok(o)
}

fn cmd_atoms(c: &ExperimentConfig) -> Result<Outcome> {
    let p = BivariatePolynomial::parse(c.phase.as_deref().unwrap_or("x*y"))?;
    let r = atom_uniformity_experiment(&SingularKernel::standard(), &p, &standard_cubes(), c.seed, c.extra_f64("quad_tol", 1e-6)?)?;
    let mut o = Outcome::new(&r)?;
    o.notes.push(format!("atom ratio {:.4}, control ratio {:.4}", r.atom_ratio, r.control_ratio));
    o.passed = c.assert.then(|| r.conditions_hold && r.atom_ratio <= 10.0 && r.control_ratio > 100.0);
    Ok(o)
}

fn cmd_pitt(c: &ExperimentConfig) -> Result<Outcome> {
    let get = |k: &str| c.extra(k).map(|v| rational::parse(v).ok_or_else(|| LabError::Invalid(format!("{k} = {v:?}: expected a rational"))));
    match (get("q"), get("alpha"), get("beta")) {
        (Some(q), Some(a), Some(b)) => {
            let (q, a, b) = (q?, a?, b?);
            let n = c.extra_u32("n", 1)?;
            let valid = pitt_exponents(n, &c.p, &q, &a, &b);
            let r = rational::to_text;
            let mut o = Outcome::new(&json!({ "n": n, "p": r(&c.p), "q": r(&q), "alpha": r(&a), "beta": r(&b), "valid": valid }))?;
            o.passed = c.assert.then_some(valid);
            Ok(o)
        }
        (None, None, None) => {
            let s = pitt_sweep(c.extra_u32("n_max", 3)?);
            let mut o = Outcome::new(&s)?;
            o.notes.push(format!("{} cases, {} valid, {} disagreements", s.checked, s.valid, s.disagreements.len()));
            o.passed = c.assert.then(|| s.disagreements.is_empty());
            Ok(o)
        }
        _ => Err(LabError::Invalid("give all of q, alpha, beta or none of them".into())),
    }
}

fn cmd_fractional(c: &ExperimentConfig) -> Result<Outcome> {
    let (a, b) = (c.extra("a").unwrap_or("2"), c.extra("b").unwrap_or("3"));
    let ra = rational::parse(a).ok_or_else(|| LabError::Invalid(format!("a = {a:?}")))?;
    let rb = rational::parse(b).ok_or_else(|| LabError::Invalid(format!("b = {b:?}")))?;
    let k = FractionalKernel::new(to_f64(&ra), to_f64(&rb))?;
    let q_line = fractional_mapping(&ra, &rb, &c.p)?;
    let q = match c.extra("q") {
        Some(v) => v.parse().map_err(|_| LabError::Invalid(format!("q = {v:?}")))?,
        None => to_f64(&q_line),
    };
    let (lo, hi) = (c.extra_f64("t_lo", -3.0)? as i32, c.extra_f64("t_hi", 3.0)? as i32);
    let ts: Vec<f64> = (lo..=hi).map(|i| 2f64.powi(i)).collect();
    let r = scaling_sweep(&k, to_f64(&c.p), q, &ts)?;
    let mut o = Outcome::new(&json!({ "interpretation": INTERPRETATION, "q_on_line": rational::to_text(&q_line), "sweep": r }))?;
    o.notes.push(format!("kernel {INTERPRETATION}"));
    o.notes.push(format!("drift {:.3e} at q = {q}", r.drift));
    o.passed = c.assert.then(|| r.drift <= c.tol);
    Ok(o)
}

fn cmd_witness(c: &ExperimentConfig) -> Result<Outcome> {
    let n = c.extra_u32("n", 3)?;
    let r = unboundedness_witness(n, &ladder(c)?, c.extra_u32("samples", 1025)? as usize)?;
    let mut o = Outcome::new(&r)?;
    o.notes.push(format!("slope {:.6} ± {:.6}, expected {}", r.slope, r.stderr, r.expected_slope));
    o.passed = c.assert.then(|| (r.slope - r.expected_slope).abs() <= c.tol);
    Ok(o)
}

fn suite_options(c: &ExperimentConfig) -> Result<SuiteOptions> {
    let only = match c.extra("only") {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse::<u8>().map_err(|_| LabError::Invalid(format!("only = {list:?}: expected ids like 1,2,3"))))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let perturb = match c.extra("perturb") {
        Some(v) => {
            let (id, d) = v.split_once(':').ok_or_else(|| LabError::Invalid(format!("perturb = {v:?}: expected id:delta")))?;
            Some((id.parse().map_err(|_| LabError::Invalid(format!("perturb id {id:?}")))?, d.parse().map_err(|_| LabError::Invalid(format!("perturb delta {d:?}")))?))
        }
        None => None,
    };
    Ok(SuiteOptions { only, perturb, seed: c.seed, policy: ResolutionPolicy { cap: c.res_cap, ..ResolutionPolicy::default() } })
}

fn cmd_suite(c: &ExperimentConfig) -> Result<Outcome> {
    let r = run_suite(&suite_options(c)?)?;
    let mut o = Outcome::new(&r)?;
    o.notes.extend(r.table().lines().map(str::to_string));
    o.passed = Some(r.all_passed);
    Ok(o)
}

pub fn execute(command: &str, c: &ExperimentConfig) -> Result<Outcome> {
    match command {
        "analyze" => cmd_analyze(c),
        "factor" => cmd_factor(c),
        "newton" => cmd_newton(c),
        "decay" => cmd_decay(c),
        "vdc" => cmd_vdc(c),
        "atoms" => cmd_atoms(c),
        "pitt" => cmd_pitt(c),
        "fractional" => cmd_fractional(c),
        "witness" => cmd_witness(c),
        "suite" => cmd_suite(c),
        other => Err(LabError::Invalid(format!("unknown command {other:?}"))),
    }
}

fn emit(command: &str, c: &ExperimentConfig, o: &Outcome) -> Result<()> {
    let echo: BTreeMap<String, String> = c.echo();
    let json = Envelope::new(command, echo, &o.result).to_json()?;
    match &c.out {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            if let Some(csv) = &o.csv {
                write_atomic(&path.with_extension("csv"), csv.as_bytes())?;
            }
            for n in &o.notes {
                println!("{n}");
            }
        }
        None => {
            for n in &o.notes {
                eprintln!("{n}");
            }
            print!("{json}");
        }
    }
    Ok(())
}

/// Runs the CLI and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, flags) = cli.command.parts();
    let result = flags.resolve(name).and_then(|c| {
        let o = execute(name, &c)?;
        emit(name, &c, &o)?;
        Ok(o)
    });
    match result {
        Ok(o) if o.passed == Some(false) => {
            eprintln!("assertion failed");
            EXIT_ASSERT
        }
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
