//! Twisted atoms and the `L¹` size of `T_P a` for singular kernels
//! `|K(x, y)| = c |x|^{−θ₀} Π |x − α_k y|^{−θ_k}` with `θ₀ + Σ θ_k = 1`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use oio_core::bivariate::FloatPolynomial;
use oio_core::quadrature::GaussLegendre;
use oio_core::BivariatePolynomial;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::integrate::{adaptive, endpoint_singular};
use crate::operator::row_coefficients;

/// Where the odd profile `s e^{−1/(1−s²)}` peaks: `s² + √2 s − 1 = 0`.
pub const PROFILE_PEAK: f64 = 0.517_638_090_205_041_4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularKernel {
    pub scale: f64,
    pub theta0: f64,
    /// `(α_k, θ_k)`.
    pub lines: Vec<(f64, f64)>,
}

impl SingularKernel {
    pub fn new(scale: f64, theta0: f64, lines: Vec<(f64, f64)>) -> Result<Self> {
        let total = theta0 + lines.iter().map(|l| l.1).sum::<f64>();
        if (total - 1.0).abs() > 1e-12 {
            return Err(LabError::Invalid(format!("kernel exponents must sum to 1, got {total}")));
        }
        if theta0 < 0.0 || lines.iter().any(|&(a, t)| !(0.0..1.0).contains(&t) || a == 0.0) {
            return Err(LabError::Invalid("need 0 <= theta < 1 and nonzero slopes".into()));
        }
        Ok(Self { scale, theta0, lines })
    }

    /// `|x − y|^{−1/2} |x + y|^{−1/2}`.
    pub fn standard() -> Self {
        Self { scale: 1.0, theta0: 0.0, lines: vec![(1.0, 0.5), (-1.0, 0.5)] }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut v = self.scale;
        if self.theta0 != 0.0 {
            v *= x.abs().powf(-self.theta0);
        }
        for &(a, t) in &self.lines {
            let d = (x - a * y).abs();
            v *= if t == 0.5 { 1.0 / d.sqrt() } else { d.powf(-t) };
        }
        v
    }

    /// `(y, θ)` where the kernel is singular in `y` at fixed `x`.
    fn singular_points(&self, x: f64) -> Vec<(f64, f64)> {
        self.lines.iter().filter(|l| l.1 > 0.0).map(|&(a, t)| (x / a, t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cube {
    pub center: f64,
    pub half_width: f64,
}

impl Cube {
    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }
    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `s e^{−1/(1−s²)}`: mean zero.
    OddBump,
    /// `e^{1 − 1/(1−s²)}`: positive, no cancellation.
    EvenBump,
}

impl Profile {
    pub fn eval(self, s: f64) -> f64 {
        let q = 1.0 - s * s;
        if q <= 0.0 {
            return 0.0;
        }
        match self {
            Profile::OddBump => s * (-1.0 / q).exp(),
            Profile::EvenBump => (1.0 - 1.0 / q).exp(),
        }
    }

    pub fn peak(self) -> f64 {
        match self {
            Profile::OddBump => self.eval(PROFILE_PEAK),
            Profile::EvenBump => 1.0,
        }
    }
}

/// `a(y) = A e^{iω} e^{−iP(c, y)} g((y − c)/r)` on the cube `[c − r, c + r]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSpec {
    pub cube: Cube,
    pub polynomial: String,
    pub profile: Profile,
    pub amplitude: f64,
    pub rotation: f64,
    #[serde(skip)]
    poly: FloatPolynomial,
    #[serde(skip)]
    center_row: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomConditions {
    pub supported_in_cube: bool,
    pub size_bound: bool,
    /// `|∫ e^{iP(c, y)} a(y) dy|`.
    pub moment: f64,
}

impl AtomConditions {
    pub fn holds(&self, tol: f64) -> bool {
        self.supported_in_cube && self.size_bound && self.moment < tol
    }
}

fn build(p: &BivariatePolynomial, cube: Cube, seed: u64, profile: Profile) -> Result<AtomSpec> {
    if !(cube.half_width > 0.0) || !cube.center.is_finite() {
        return Err(LabError::Invalid("cube half-width must be positive".into()));
    }
    let poly = p.to_f64_terms();
    let mut center_row = Vec::new();
    row_coefficients(&poly, cube.center, &mut center_row);
    let rotation = rand_chacha::ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..TAU);
    // sup |a| = 1/|Q| = 1/(2r).
    let amplitude = 1.0 / (2.0 * cube.half_width * profile.peak());
    Ok(AtomSpec { cube, polynomial: p.to_string(), profile, amplitude, rotation, poly, center_row })
}

pub fn make_atom(p: &BivariatePolynomial, cube: Cube, seed: u64) -> Result<AtomSpec> {
    build(p, cube, seed, Profile::OddBump)
}

/// Same size and support as an atom but without the twisted cancellation.
pub fn make_control(p: &BivariatePolynomial, cube: Cube, seed: u64) -> Result<AtomSpec> {
    build(p, cube, seed, Profile::EvenBump)
}

fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

impl AtomSpec {
    /// `P(c, y)`.
    pub fn center_phase(&self, y: f64) -> f64 {
        horner(&self.center_row, y)
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        let s = (y - self.cube.center) / self.cube.half_width;
        let g = self.profile.eval(s);
        if g == 0.0 {
            return Complex64::default();
        }
        Complex64::from_polar(self.amplitude * g, self.rotation - self.center_phase(y))
    }

    pub fn sup_bound(&self) -> f64 {
        1.0 / (2.0 * self.cube.half_width)
    }

    pub fn conditions(&self) -> AtomConditions {
        let rule = GaussLegendre::new(16);
        let moment: Complex64 = rule.composite(self.cube.lo(), self.cube.hi(), 64, |y| {
            self.eval(y) * Complex64::from_polar(1.0, self.center_phase(y))
        });
        let outside = [self.cube.lo() - 1e-9, self.cube.hi() + 1e-9, self.cube.lo(), self.cube.hi()];
        let supported_in_cube = outside.iter().all(|&y| self.eval(y) == Complex64::default());
        let peak = self.amplitude * self.profile.peak();
        AtomConditions { supported_in_cube, size_bound: peak <= self.sup_bound() * (1.0 + 1e-15), moment: moment.norm() }
    }
}

/// Evaluates `T_P a(x) = ∫ e^{iP(x,y)} K(x, y) a(y) dy`.
#[derive(Debug, Clone)]
pub struct TwistedOperator<'a> {
    pub kernel: &'a SingularKernel,
    pub atom: &'a AtomSpec,
    rule: GaussLegendre,
    /// Oscillations per panel are kept below `1 / panel_density`.
    pub panel_density: f64,
}

impl<'a> TwistedOperator<'a> {
    pub fn new(kernel: &'a SingularKernel, atom: &'a AtomSpec) -> Self {
        Self { kernel, atom, rule: GaussLegendre::new(16), panel_density: 1.0 }
    }

    fn frequency(&self, row: &[f64]) -> f64 {
        // max |∂_y (P(x, y) − P(c, y))| over the cube, by coefficient bounds.
        let r = self.atom.cube.lo().abs().max(self.atom.cube.hi().abs());
        let mut w = 0.0;
        for k in 1..row.len().max(self.atom.center_row.len()) {
            let a = row.get(k).copied().unwrap_or(0.0) - self.atom.center_row.get(k).copied().unwrap_or(0.0);
            w += (k as f64) * a.abs() * r.powi(k as i32 - 1);
        }
        w
    }

    /// Value at `x` and the number of integrand evaluations.
    pub fn apply(&self, x: f64) -> (Complex64, u64) {
        let (u0, u1) = (self.atom.cube.lo(), self.atom.cube.hi());
        let mut row = Vec::new();
        row_coefficients(&self.atom.poly, x, &mut row);
        let omega = self.frequency(&row);
        let integrand = |y: f64| -> Complex64 {
            let a = self.atom.eval(y);
            if a == Complex64::default() {
                return a;
            }
            a * Complex64::from_polar(self.kernel.eval(x, y), horner(&row, y))
        };
        let mut cuts: Vec<(f64, f64)> = vec![(u0, 0.0), (u1, 0.0)];
        for (s, t) in self.kernel.singular_points(x) {
            if s > u0 && s < u1 {
                cuts.push((s, t));
            }
        }
        cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = Complex64::default();
        let mut evals = 0u64;
        for w in cuts.windows(2) {
            let ((u, tu), (v, tv)) = (w[0], w[1]);
            if v <= u {
                continue;
            }
            let pieces: Vec<(f64, f64, f64, f64)> = if tu > 0.0 && tv > 0.0 {
                let m = 0.5 * (u + v);
                vec![(u, m, tu, 0.0), (m, v, 0.0, tv)]
            } else {
                vec![(u, v, tu, tv)]
            };
            for (a, b, ta, tb) in pieces {
                let (val, n) = self.segment(&integrand, a, b, ta, tb, omega);
                total += val;
                evals += n;
            }
        }
        (total, evals)
    }

    /// One segment with at most one singular endpoint, removed by `y − s = ±t^{1/(1−θ)}`.
    fn segment<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64, ta: f64, tb: f64, omega: f64) -> (Complex64, u64) {
        let len = b - a;
        let (theta, from_left) = if ta > 0.0 { (ta, true) } else { (tb, false) };
        let m = if theta > 0.0 { 1.0 / (1.0 - theta) } else { 1.0 };
        let panels = (12.0 + self.panel_density * m * omega * len / std::f64::consts::PI).ceil() as usize;
        let evals = (panels * self.rule.len()) as u64;
        (endpoint_singular(&self.rule, f, a, b, theta, from_left, panels), evals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1Estimate {
    pub value: f64,
    /// `max(2^10, 2^5 (|c| + r))`.
    pub truncation_radius: f64,
    /// Where integration stopped once outer shells became negligible.
    pub radius_reached: f64,
    pub tail_estimate: f64,
    pub evaluations: u64,
}

/// `∫ |T_P a(x)| dx`, out to the truncation radius or until dyadic shells stop contributing.
pub fn l1_norm(kernel: &SingularKernel, atom: &AtomSpec, tol: f64) -> L1Estimate {
    let op = TwistedOperator::new(kernel, atom);
    let outer_eval = std::sync::atomic::AtomicU64::new(0);
    let f = |x: f64| {
        let (v, n) = op.apply(x);
        outer_eval.fetch_add(n, std::sync::atomic::Ordering::Relaxed);
        v.norm()
    };
    let rule = GaussLegendre::new(8);
    let cube = atom.cube;
    let reach = cube.center.abs() + cube.half_width;
    let truncation_radius = (1024f64).max(32.0 * reach);
    let mut marks = vec![0.0, cube.lo().abs(), cube.hi().abs()];
    for &(a, _) in &kernel.lines {
        marks.push((a * cube.lo()).abs());
        marks.push((a * cube.hi()).abs());
    }
    marks.retain(|m| *m < truncation_radius);
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let inner = *marks.last().unwrap_or(&0.0);
    let mut evals = 0u64;
    let mut total = 0.0;
    for w in marks.windows(2) {
        for (a, b) in [(w[0], w[1]), (-w[1], -w[0])] {
            if b > a {
                total += adaptive(&rule, &f, a, b, tol, &mut evals);
            }
        }
    }
    let mut lo = inner.max(2f64.powi(-10));
    let mut last = f64::INFINITY;
    let mut radius_reached = lo;
    while lo < truncation_radius {
        let hi = (2.0 * lo).min(truncation_radius);
        let shell = adaptive(&rule, &f, lo, hi, tol, &mut evals) + adaptive(&rule, &f, -hi, -lo, tol, &mut evals);
        total += shell;
        radius_reached = hi;
        last = shell;
        if hi > 4.0 * inner.max(1.0) && shell < 1e-9 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        lo = hi;
    }
    evals += outer_eval.load(std::sync::atomic::Ordering::Relaxed);
    L1Estimate { value: total, truncation_radius, radius_reached, tail_estimate: last, evaluations: evals }
}

/// Ten log-spaced centers in `[1/4, 4]` times five widths in `[1/8, 2]`.
pub fn standard_cubes() -> Vec<Cube> {
    let mut cubes = Vec::with_capacity(50);
    for i in 0..10 {
        let center = 2f64.powf(-2.0 + 4.0 * i as f64 / 9.0);
        for j in 0..5 {
            cubes.push(Cube { center, half_width: 2f64.powi(j - 3) });
        }
    }
    cubes
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomRow {
    pub cube: Cube,
    pub atom_norm: f64,
    pub atom_tail: f64,
    pub control_norm: f64,
    pub control_tail: f64,
    pub moment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomReport {
    pub kernel: SingularKernel,
    pub polynomial: String,
    pub rows: Vec<AtomRow>,
    pub atom_ratio: f64,
    pub control_ratio: f64,
    pub conditions_hold: bool,
    pub evaluations: u64,
}

fn spread(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::MIN, f64::max);
    let min = values.fold(f64::MAX, f64::min);
    max / min
}

pub fn atom_uniformity_experiment(
    kernel: &SingularKernel,
    p: &BivariatePolynomial,
    cubes: &[Cube],
    seed: u64,
    tol: f64,
) -> Result<AtomReport> {
    if cubes.is_empty() {
        return Err(LabError::Invalid("need at least one cube".into()));
    }
    let results: Vec<Result<(AtomRow, bool, u64)>> = cubes
        .par_iter()
        .enumerate()
        .map(|(i, &cube)| {
            let atom = make_atom(p, cube, seed.wrapping_add(i as u64))?;
            let control = make_control(p, cube, seed.wrapping_add(i as u64))?;
            let cond = atom.conditions();
            let a = l1_norm(kernel, &atom, tol);
            let c = l1_norm(kernel, &control, tol);
            let row = AtomRow {
                cube,
                atom_norm: a.value,
                atom_tail: a.tail_estimate,
                control_norm: c.value,
                control_tail: c.tail_estimate,
                moment: cond.moment,
            };
            Ok((row, cond.holds(1e-10), a.evaluations + c.evaluations))
        })
        .collect();
    let mut rows = Vec::with_capacity(cubes.len());
    let mut ok = true;
    let mut evaluations = 0;
    for r in results {
        let (row, holds, n) = r?;
        rows.push(row);
        ok &= holds;
        evaluations += n;
    }
    Ok(AtomReport {
        kernel: kernel.clone(),
        polynomial: p.to_string(),
        atom_ratio: spread(rows.iter().map(|r| r.atom_norm)),
        control_ratio: spread(rows.iter().map(|r| r.control_norm)),
        rows,
        conditions_hold: ok,
        evaluations,
    })
}
