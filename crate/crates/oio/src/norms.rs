//! Norm estimates for discretized operators.
//!
//! All values carry the quadrature weights, so they approximate norms of the
//! continuum operator rather than of the raw matrix.

use num_complex::Complex64;
use oio_core::cutoff::bump;
use oio_core::Rational;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::grid::{weighted_lp_norm, Grid1D};
use crate::operator::DiscretizedOperator;
use crate::report::rational_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    SingularValue,
    Schur,
    TrialLowerBound,
}

impl NormMethod {
    pub fn name(self) -> &'static str {
        match self {
            NormMethod::SingularValue => "singular_value",
            NormMethod::Schur => "schur",
            NormMethod::TrialLowerBound => "trial_lower_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    #[serde(serialize_with = "rational_text")]
    pub p: Rational,
    pub value: f64,
    pub method: NormMethod,
    /// Lanczos steps, or trials evaluated.
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Number of eigenvalues of the symmetric tridiagonal `(alpha, beta)` below `x`.
fn eigenvalues_below(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for k in 0..alpha.len() {
        let b2 = if k == 0 { 0.0 } else { beta[k - 1] * beta[k - 1] };
        d = alpha[k] - x - if k == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (alpha[k].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn largest_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let m = alpha.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..m {
        let r = if k > 0 { beta[k - 1].abs() } else { 0.0 } + if k + 1 < m { beta[k].abs() } else { 0.0 };
        lo = lo.min(alpha[k] - r);
        hi = hi.max(alpha[k] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eigenvalues_below(alpha, beta, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Last component of the normalized top eigenvector, by inverse iteration.
fn top_vector_tail(alpha: &[f64], beta: &[f64], theta: f64) -> f64 {
    let m = alpha.len();
    let shift = theta + 1e-12 * theta.abs().max(1e-300);
    let mut v = vec![1.0; m];
    for _ in 0..3 {
        // Thomas algorithm on the negative definite T − shift.
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        for k in 0..m {
            let a = alpha[k] - shift;
            let sub = if k > 0 { beta[k - 1] } else { 0.0 };
            let denom = a - sub * if k > 0 { c[k - 1] } else { 0.0 };
            c[k] = if k + 1 < m { beta[k] / denom } else { 0.0 };
            d[k] = (v[k] - sub * if k > 0 { d[k - 1] } else { 0.0 }) / denom;
        }
        for k in (0..m).rev() {
            v[k] = d[k] - if k + 1 < m { c[k] * v[k + 1] } else { 0.0 };
        }
        let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        v.iter_mut().for_each(|t| *t /= n);
    }
    v[m - 1].abs()
}

/// Largest singular value from Lanczos on `K*K` started at the normalized all-ones vector.
///
/// Stops when successive Ritz values agree to relative `tol`; the reported
/// residual is `‖K*K u − θ u‖` for the Ritz vector `u`, converted to the scale of `σ`.
pub fn operator_norm_l2(op: &DiscretizedOperator, tol: f64) -> Result<NormEstimate> {
    operator_norm_l2_capped(op, tol, 10_000)
}

pub fn operator_norm_l2_capped(op: &DiscretizedOperator, tol: f64, max_iterations: usize) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(LabError::Invalid("tol must be positive".into()));
    }
    let n = op.cols();
    let scale = (op.row_grid.weight() / op.col_grid.weight()).sqrt();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut q = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut prev = f64::NAN;
    let finish = |theta: f64, residual: f64, iterations: usize| NormEstimate {
        p: Rational::from_integer(2.into()),
        value: scale * theta.max(0.0).sqrt(),
        method: NormMethod::SingularValue,
        iterations,
        residual: scale * residual / (2.0 * theta.max(f64::MIN_POSITIVE).sqrt()),
    };
    for step in 1..=max_iterations.min(n) {
        let mut w = op.apply_adjoint(&op.apply(&q));
        let a = dot(&q, &w).re;
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= qi * a;
        }
        if let (Some(last), Some(&b)) = (basis.last(), beta.last()) {
            for (wi, qi) in w.iter_mut().zip(last as &Vec<Complex64>) {
                *wi -= qi * b;
            }
        }
        basis.push(q);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= vi * c;
                }
            }
        }
        let b = norm2(&w);
        let theta = largest_eigenvalue(&alpha, &beta);
        let residual = b * top_vector_tail(&alpha, &beta, theta);
        let converged = (theta - prev).abs() <= tol * theta.abs()
            || b <= 1e-14 * theta.abs().max(f64::MIN_POSITIVE)
            || step == n
            || theta == 0.0;
        if converged {
            return Ok(finish(theta, residual, step));
        }
        prev = theta;
        beta.push(b);
        q = w.into_iter().map(|z| z / b).collect();
    }
    let theta = largest_eigenvalue(&alpha, &beta[..alpha.len() - 1]);
    let est = finish(theta, f64::NAN, alpha.len());
    Err(LabError::NoConvergence { iterations: alpha.len(), value: est.value, residual: (theta - prev).abs() })
}

/// `√(A B)` with `A` the largest weighted row sum and `B` the largest weighted column sum of `|K|`.
pub fn schur_bound(op: &DiscretizedOperator) -> NormEstimate {
    let (r, c) = (op.rows(), op.cols());
    let mut cols = vec![0.0; c];
    let mut a = 0.0f64;
    for i in 0..r {
        let row = op.row(i);
        let mut s = 0.0;
        for (acc, k) in cols.iter_mut().zip(row) {
            let v = k.norm();
            s += v;
            *acc += v;
        }
        a = a.max(s);
    }
    let ratio = op.row_grid.weight() / op.col_grid.weight();
    let b = cols.iter().cloned().fold(0.0, f64::max) * ratio;
    NormEstimate { p: Rational::from_integer(2.into()), value: (a * b).sqrt(), method: NormMethod::Schur, iterations: 0, residual: 0.0 }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trial {
    /// `bump(y; center, width) · e^{i frequency y}`.
    Bump { center: f64, width: f64, frequency: f64 },
    /// Indicator of column cell `j`.
    Column(usize),
    Vector(Vec<Complex64>),
}

impl Trial {
    pub fn sample(&self, grid: &Grid1D) -> Vec<Complex64> {
        match self {
            Trial::Bump { center, width, frequency } => grid
                .points()
                .into_iter()
                .map(|y| Complex64::from_polar(bump(y, *center, *width), frequency * y))
                .collect(),
            Trial::Column(j) => {
                let mut v = vec![Complex64::default(); grid.count];
                v[*j] = Complex64::new(1.0, 0.0);
                v
            }
            Trial::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrialFamily {
    pub trials: Vec<Trial>,
}

impl TrialFamily {
    /// Bumps of widths `2^{-k}`, `k_lo ..= k_hi`, each placed at `placements` evenly spread centers.
    pub fn dyadic_bumps(grid: &Grid1D, k_lo: i32, k_hi: i32, placements: usize, frequencies: &[f64]) -> Self {
        let mut trials = Vec::new();
        let freqs: &[f64] = if frequencies.is_empty() { &[0.0] } else { frequencies };
        for k in k_lo..=k_hi {
            let width = (2f64).powi(-k);
            if width < 2.0 * grid.weight() {
                continue;
            }
            let span = grid.len() - 2.0 * width;
            let centers: Vec<f64> = if span <= 0.0 || placements <= 1 {
                vec![0.5 * (grid.lo + grid.hi)]
            } else {
                (0..placements).map(|m| grid.lo + width + span * m as f64 / (placements - 1) as f64).collect()
            };
            for &center in &centers {
                for &frequency in freqs {
                    trials.push(Trial::Bump { center, width, frequency });
                }
            }
        }
        Self { trials }
    }
}

/// `‖K f‖_p / ‖f‖_p` for one trial, in weighted discrete norms.
pub fn trial_ratio(op: &DiscretizedOperator, p: f64, f: &[Complex64]) -> Option<f64> {
    let nf = weighted_lp_norm(f.iter().map(|z| z.norm()), op.col_grid.weight(), p);
    if !(nf > 0.0) {
        return None;
    }
    let g = op.apply(f);
    Some(weighted_lp_norm(g.iter().map(|z| z.norm()), op.row_grid.weight(), p) / nf)
}

/// Best ratio over the family; a lower bound for the `L^p → L^p` norm up to discretization error.
pub fn lp_norm_lower_bound(op: &DiscretizedOperator, p: &Rational, family: &TrialFamily) -> Result<NormEstimate> {
    let pf = oio_core::rational::to_f64(p);
    if !(pf >= 1.0) {
        return Err(LabError::Invalid("need p >= 1".into()));
    }
    let mut best = 0.0f64;
    let mut tried = 0;
    for t in &family.trials {
        if let Some(r) = trial_ratio(op, pf, &t.sample(&op.col_grid)) {
            best = best.max(r);
            tried += 1;
        }
    }
    if tried == 0 {
        return Err(LabError::Invalid("trial family is empty on this grid".into()));
    }
    Ok(NormEstimate { p: p.clone(), value: best, method: NormMethod::TrialLowerBound, iterations: tried, residual: 0.0 })
}
