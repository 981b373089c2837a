//! Discretized oscillatory integral operators
//! `T_λ f(x) = ∫ e^{iλS(x,y)} φ(x,y) |D(x,y)|^z f(y) dy`.
//!
//! Kernels live on midpoint grids with entries already multiplied by the
//! column weight, so `K · f` is the quadrature of `T_λ f` at the row points.
//! When the kernel satisfies `K(−x, −y) = K(x, y)` the operator splits into
//! even and odd parts, each carried by a half-size matrix on `[0, r]`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use oio_core::bivariate::FloatPolynomial;
use oio_core::cutoff::SmoothCutoff;
use oio_core::roots::isolate_real_roots;
use oio_core::{Axis, BivariatePolynomial, DampingFactor, DampingSpec, HomogeneousPhase};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::grid::Grid1D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionPolicy {
    /// Bound on `spacing × |λ| × max |∇S|` per variable.
    pub margin: f64,
    /// Largest stored matrix is `cap × cap`.
    pub cap: usize,
    pub min_count: usize,
    /// Extra grid doublings on top of the Nyquist count.
    pub refinement: u32,
}

impl Default for ResolutionPolicy {
    fn default() -> Self {
        Self { margin: FRAC_PI_4, cap: 4096, min_count: 256, refinement: 0 }
    }
}

/// Which invariant subspace of `f ↦ f(−·)` a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Full,
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorMeta {
    pub phase: String,
    pub lambda: f64,
    pub damping: Option<String>,
    pub cutoff: String,
    pub sector: Sector,
}

impl OperatorMeta {
    fn plain(label: &str) -> Self {
        Self { phase: label.to_string(), lambda: 0.0, damping: None, cutoff: "none".into(), sector: Sector::Full }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    pub row_grid: Grid1D,
    pub col_grid: Grid1D,
    kernel: Vec<Complex64>,
    pub meta: OperatorMeta,
}

fn check_budget(rows: usize, cols: usize, cap: usize) -> Result<()> {
    if rows.saturating_mul(cols) > cap.saturating_mul(cap) {
        return Err(LabError::MemoryBudget { rows, cols, cap });
    }
    Ok(())
}

impl DiscretizedOperator {
    /// Entries must already include the column weight.
    pub fn from_entries(row_grid: Grid1D, col_grid: Grid1D, kernel: Vec<Complex64>, meta: OperatorMeta) -> Result<Self> {
        if kernel.len() != row_grid.count * col_grid.count {
            return Err(LabError::Invalid("kernel size does not match the grids".into()));
        }
        Ok(Self { row_grid, col_grid, kernel, meta })
    }

    /// `K[i][j] = k(x_i, y_j) · w_col`.
    pub fn from_kernel<F>(row_grid: Grid1D, col_grid: Grid1D, cap: usize, kernel: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        check_budget(row_grid.count, col_grid.count, cap)?;
        let ys = col_grid.points();
        let w = col_grid.weight();
        let entries = fill_rows(row_grid, ys.len(), |x, row| {
            for (k, &y) in row.iter_mut().zip(&ys) {
                *k = kernel(x, y) * w;
            }
        });
        Ok(Self { row_grid, col_grid, kernel: entries, meta: OperatorMeta::plain("custom") })
    }

    pub fn rows(&self) -> usize {
        self.row_grid.count
    }

    pub fn cols(&self) -> usize {
        self.col_grid.count
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.kernel[i * self.cols() + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let c = self.cols();
        &self.kernel[i * c..(i + 1) * c]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.kernel
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.cols());
        self.kernel
            .par_chunks(self.cols())
            .map(|row| row.iter().zip(f).map(|(k, v)| k * v).sum())
            .collect()
    }

    /// `K* g`.
    pub fn apply_adjoint(&self, g: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(g.len(), self.rows());
        let c = self.cols();
        self.kernel
            .par_chunks(c)
            .zip(g.par_iter())
            .fold(
                || vec![Complex64::default(); c],
                |mut acc, (row, gi)| {
                    for (a, k) in acc.iter_mut().zip(row) {
                        *a += k.conj() * gi;
                    }
                    acc
                },
            )
            .reduce(
                || vec![Complex64::default(); c],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    }

    /// The kernel `|K|`.
    pub fn abs(&self) -> Self {
        Self { kernel: self.kernel.iter().map(|k| Complex64::new(k.norm(), 0.0)).collect(), ..self.clone() }
    }

    /// Matrix of the adjoint operator, with the roles of the grids exchanged.
    pub fn adjoint(&self) -> Self {
        let (r, c) = (self.rows(), self.cols());
        let scale = self.row_grid.weight() / self.col_grid.weight();
        let mut kernel = vec![Complex64::default(); r * c];
        for i in 0..r {
            for j in 0..c {
                kernel[j * r + i] = self.kernel[i * c + j].conj() * scale;
            }
        }
        Self { row_grid: self.col_grid, col_grid: self.row_grid, kernel, meta: self.meta.clone() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.kernel.iter().all(|k| k.im == 0.0 && k.re >= 0.0)
    }

    /// `‖A − B‖_F · √(w_r / w_c)`, an upper bound for the continuum `L²` distance.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.kernel.len(), other.kernel.len());
        let s: f64 = self.kernel.iter().zip(&other.kernel).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * self.row_grid.weight() / self.col_grid.weight()).sqrt()
    }
}

fn fill_rows<F>(row_grid: Grid1D, cols: usize, fill: F) -> Vec<Complex64>
where
    F: Fn(f64, &mut [Complex64]) + Sync,
{
    let mut kernel = vec![Complex64::default(); row_grid.count * cols];
    kernel.par_chunks_mut(cols).enumerate().for_each(|(i, row)| fill(row_grid.point(i), row));
    kernel
}

/// Dense `y`-coefficients of `p(x, ·)` at a fixed `x`.
pub(crate) fn row_coefficients(p: &FloatPolynomial, x: f64, out: &mut Vec<f64>) {
    out.clear();
    for &(i, j, c) in &p.terms {
        let j = j as usize;
        if out.len() <= j {
            out.resize(j + 1, 0.0);
        }
        out[j] += c * x.powi(i as i32);
    }
}

/// `(p(x, y), p(x, −y))` from the dense row coefficients.
pub(crate) fn horner_pm(coeffs: &[f64], y: f64) -> (f64, f64) {
    let y2 = y * y;
    let (mut even, mut odd) = (0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate().rev() {
        if k % 2 == 0 {
            even = even * y2 + c;
        } else {
            odd = odd * y2 + c;
        }
    }
    (even + y * odd, even - y * odd)
}

#[derive(Debug, Clone, PartialEq)]
enum FastDamping {
    Polynomial(FloatPolynomial),
    Pedestal { inv_alpha: f64, floor: f64 },
}

/// `|D|^{re_z + i z_im}` with the conventions at zeros of `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Damping {
    pub factor: DampingFactor,
    pub re_z: f64,
    pub z_im: f64,
    fast: FastDamping,
}

impl Damping {
    pub fn new(factor: DampingFactor, re_z: f64, z_im: f64, lambda: f64) -> Self {
        let fast = match &factor {
            DampingFactor::Polynomial(p) => FastDamping::Polynomial(p.to_f64_terms()),
            DampingFactor::Pedestal { alpha, n } => FastDamping::Pedestal {
                inv_alpha: 1.0 / alpha.to_f64(),
                floor: lambda.abs().powf(-1.0 / *n as f64),
            },
        };
        Self { factor, re_z, z_im, fast }
    }

    pub fn from_spec(spec: &DampingSpec, z_im: f64, lambda: f64) -> Self {
        Self::new(spec.factor.clone(), oio_core::rational::to_f64(&spec.re_z), z_im, lambda)
    }

    pub fn is_trivial(&self) -> bool {
        self.re_z == 0.0 && self.z_im == 0.0
    }

    fn weight_of_abs(&self, d: f64) -> Complex64 {
        if self.is_trivial() {
            return Complex64::new(1.0, 0.0);
        }
        if d == 0.0 {
            return Complex64::default();
        }
        let l = d.ln();
        Complex64::from_polar((self.re_z * l).exp(), self.z_im * l)
    }

    pub fn weight(&self, x: f64, y: f64) -> Complex64 {
        let d = match &self.fast {
            FastDamping::Polynomial(p) => p.eval(x, y).abs(),
            FastDamping::Pedestal { inv_alpha, floor } => floor + (x - y * inv_alpha).abs(),
        };
        self.weight_of_abs(d)
    }

    /// Weights at `(x, y)` and `(x, −y)`; `row` holds the `y`-coefficients of `D(x, ·)`.
    fn weights_pm(&self, row: &[f64], x: f64, y: f64) -> (Complex64, Complex64) {
        let (dp, dm) = match &self.fast {
            FastDamping::Polynomial(_) => horner_pm(row, y),
            FastDamping::Pedestal { inv_alpha, floor } => (floor + (x - y * inv_alpha).abs(), floor + (x + y * inv_alpha).abs()),
        };
        (self.weight_of_abs(dp.abs()), self.weight_of_abs(dm.abs()))
    }

    pub fn description(&self) -> String {
        format!("|{}|^({} + {}i)", self.factor.description(), self.re_z, self.z_im)
    }
}

/// A fully specified continuum kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub phase: HomogeneousPhase,
    pub lambda: f64,
    pub cutoff: SmoothCutoff,
    pub damping: Option<Damping>,
    poly: FloatPolynomial,
}

impl KernelSpec {
    pub fn new(phase: &HomogeneousPhase, lambda: f64, cutoff: SmoothCutoff, damping: Option<Damping>) -> Self {
        let poly = phase.to_polynomial().to_f64_terms();
        Self { phase: phase.clone(), lambda, cutoff, damping, poly }
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let amp = self.cutoff.eval(x, y);
        if amp == 0.0 {
            return Complex64::default();
        }
        let mut k = Complex64::from_polar(amp, self.lambda * self.poly.eval(x, y));
        if let Some(d) = &self.damping {
            k *= d.weight(x, y);
        }
        k
    }

    /// `K(−x, −y) = K(x, y)`: even degree and a cutoff centered at the origin.
    pub fn is_even(&self) -> bool {
        self.phase.degree() % 2 == 0 && self.cutoff.is_centered()
    }

    /// Upper bounds of `|∂_x S|` and `|∂_y S|` on the cutoff support.
    pub fn gradient_bounds(&self) -> (f64, f64) {
        let (x0, x1) = self.cutoff.support_x();
        let (y0, y1) = self.cutoff.support_y();
        let rx = x0.abs().max(x1.abs());
        let ry = y0.abs().max(y1.abs());
        (self.poly.derivative_x().abs_bound(rx, ry), self.poly.derivative_y().abs_bound(rx, ry))
    }

    fn label(&self, sector: Sector) -> OperatorMeta {
        OperatorMeta {
            phase: self.phase.to_string(),
            lambda: self.lambda,
            damping: self.damping.as_ref().map(Damping::description),
            cutoff: self.cutoff.name().to_string(),
            sector,
        }
    }

    /// Row and column grids for the requested sector under the Nyquist policy.
    pub fn grids(&self, sector: Sector, policy: &ResolutionPolicy) -> Result<(Grid1D, Grid1D)> {
        let (gx, gy) = self.gradient_bounds();
        let lam = self.lambda.abs();
        let (mut x0, x1) = self.cutoff.support_x();
        let (mut y0, y1) = self.cutoff.support_y();
        if sector != Sector::Full {
            if !self.is_even() {
                return Err(LabError::Invalid("parity sectors need an even kernel".into()));
            }
            x0 = 0.0;
            y0 = 0.0;
        }
        // Rows are sampled in x, so the x-spacing is limited by ∂_x S.
        let rows = Grid1D::with_spacing(x0, x1, policy.margin / (lam * gx), policy.min_count)?;
        let cols = Grid1D::with_spacing(y0, y1, policy.margin / (lam * gy), policy.min_count)?;
        let scale = 1usize << policy.refinement;
        let rows = Grid1D { count: rows.count * scale, ..rows };
        let cols = Grid1D { count: cols.count * scale, ..cols };
        check_budget(rows.count, cols.count, policy.cap)?;
        Ok((rows, cols))
    }

    /// Rejects grids that violate the Nyquist policy.
    pub fn check_resolution(&self, rows: &Grid1D, cols: &Grid1D, margin: f64) -> Result<()> {
        let (gx, gy) = self.gradient_bounds();
        let lam = self.lambda.abs();
        for (axis, spacing, g) in [("x", rows.weight(), gx), ("y", cols.weight(), gy)] {
            if spacing * lam * g > margin {
                return Err(LabError::ResolutionTooCoarse { axis, spacing, limit: margin / (lam * g) });
            }
        }
        Ok(())
    }

    /// Builds the matrix on explicit grids after checking the policy.
    pub fn discretize_on(&self, rows: Grid1D, cols: Grid1D, sector: Sector, policy: &ResolutionPolicy) -> Result<DiscretizedOperator> {
        self.check_resolution(&rows, &cols, policy.margin)?;
        check_budget(rows.count, cols.count, policy.cap)?;
        if sector != Sector::Full && (!self.is_even() || rows.lo != 0.0 || cols.lo != 0.0) {
            return Err(LabError::Invalid("parity sectors need an even kernel on [0, r] grids".into()));
        }
        let ys = cols.points();
        let w = cols.weight();
        let cut_y: Vec<f64> = ys.iter().map(|&y| self.cutoff.y_factor(y)).collect();
        let cut_y_neg: Vec<f64> = ys.iter().map(|&y| self.cutoff.y_factor(-y)).collect();
        let lam = self.lambda;
        let sign = match sector {
            Sector::Odd => -1.0,
            _ => 1.0,
        };
        let kernel = fill_rows(rows, ys.len(), |x, row| {
            let cx = self.cutoff.x_factor(x);
            if cx == 0.0 {
                row.fill(Complex64::default());
                return;
            }
            let mut coeffs = Vec::new();
            row_coefficients(&self.poly, x, &mut coeffs);
            let mut dcoeffs = Vec::new();
            if let Some(Damping { fast: FastDamping::Polynomial(p), .. }) = &self.damping {
                row_coefficients(p, x, &mut dcoeffs);
            }
            for (j, k) in row.iter_mut().enumerate() {
                let y = ys[j];
                let (s_plus, s_minus) = horner_pm(&coeffs, y);
                let dw = self.damping.as_ref().map(|d| d.weights_pm(&dcoeffs, x, y));
                let mut v = Complex64::from_polar(cx * cut_y[j], lam * s_plus);
                if let Some((dp, _)) = dw {
                    v *= dp;
                }
                if sector != Sector::Full {
                    let mut m = Complex64::from_polar(cx * cut_y_neg[j], lam * s_minus);
                    if let Some((_, dm)) = dw {
                        m *= dm;
                    }
                    v += m * sign;
                }
                *k = v * w;
            }
        });
        Ok(DiscretizedOperator { row_grid: rows, col_grid: cols, kernel, meta: self.label(sector) })
    }

    pub fn discretize(&self, sector: Sector, policy: &ResolutionPolicy) -> Result<DiscretizedOperator> {
        let (rows, cols) = self.grids(sector, policy)?;
        self.discretize_on(rows, cols, sector, policy)
    }

    /// The sectors whose norms combine to the full operator norm.
    pub fn sectors(&self) -> &'static [Sector] {
        if self.is_even() {
            &[Sector::Even, Sector::Odd]
        } else {
            &[Sector::Full]
        }
    }
}

pub fn discretize_t(phase: &HomogeneousPhase, cutoff: &SmoothCutoff, lambda: f64, policy: &ResolutionPolicy) -> Result<DiscretizedOperator> {
    KernelSpec::new(phase, lambda, cutoff.clone(), None).discretize(Sector::Full, policy)
}

/// Kernel spec for the damped operator, rejecting supports that meet `{D = 0}` when `Re z < 0`.
pub fn damped_kernel(
    phase: &HomogeneousPhase,
    damping: &DampingSpec,
    z_im: f64,
    lambda: f64,
    cutoff: &SmoothCutoff,
) -> Result<KernelSpec> {
    let d = Damping::from_spec(damping, z_im, lambda);
    if d.re_z < 0.0 {
        if let DampingFactor::Polynomial(p) = &damping.factor {
            if vanishes_on_box(p, cutoff.support_x(), cutoff.support_y()) {
                return Err(LabError::SingularDamping { re_z: d.re_z });
            }
        }
    }
    Ok(KernelSpec::new(phase, lambda, cutoff.clone(), Some(d)))
}

pub fn discretize_damped(
    phase: &HomogeneousPhase,
    damping: &DampingSpec,
    z_im: f64,
    lambda: f64,
    cutoff: &SmoothCutoff,
    policy: &ResolutionPolicy,
) -> Result<DiscretizedOperator> {
    damped_kernel(phase, damping, z_im, lambda, cutoff)?.discretize(Sector::Full, policy)
}

fn interval_meets(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Whether the closed box meets the real zero set of `d`.
pub fn vanishes_on_box(d: &BivariatePolynomial, bx: (f64, f64), by: (f64, f64)) -> bool {
    if d.is_zero() {
        return true;
    }
    if d.homogeneity().is_none() {
        return vanishes_on_box_sampled(d, bx, by);
    }
    let contains_origin = bx.0 <= 0.0 && 0.0 <= bx.1 && by.0 <= 0.0 && 0.0 <= by.1;
    if contains_origin && d.total_degree() != Some(0) {
        return true;
    }
    let Ok((gamma, beta, g)) = d.dehomogenize(Axis::X) else { return true };
    if gamma > 0 && bx.0 <= 0.0 && 0.0 <= bx.1 {
        return true;
    }
    if beta > 0 && by.0 <= 0.0 && 0.0 <= by.1 {
        return true;
    }
    let Ok(roots) = isolate_real_roots(&g) else { return true };
    roots.iter().any(|r| {
        let t = r.to_f64();
        let (a, b) = (t * bx.0, t * bx.1);
        interval_meets((a.min(b), a.max(b)), by)
    })
}

fn vanishes_on_box_sampled(d: &BivariatePolynomial, bx: (f64, f64), by: (f64, f64)) -> bool {
    let p = d.to_f64_terms();
    let n = 64;
    let mut sign = 0.0f64;
    for i in 0..=n {
        for j in 0..=n {
            let x = bx.0 + (bx.1 - bx.0) * i as f64 / n as f64;
            let y = by.0 + (by.1 - by.0) * j as f64 / n as f64;
            let v = p.eval(x, y);
            if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
                return true;
            }
            sign = v.signum();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use oio_core::factor::analyze_damping;

    fn bump_cutoff(r: f64) -> SmoothCutoff {
        SmoothCutoff::tensor_bump((0.0, 0.0), (r, r))
    }

    #[test]
    fn horner_both_signs() {
        let p = BivariatePolynomial::parse("x^3*y - 2*x*y^2 + y^5 + 3*x^2").unwrap().to_f64_terms();
        let mut c = Vec::new();
        for &(x, y) in &[(0.3, 0.7), (-1.2, 0.4), (2.0, -1.5)] {
            row_coefficients(&p, x, &mut c);
            let (a, b) = horner_pm(&c, y);
            assert!((a - p.eval(x, y)).abs() < 1e-12);
            assert!((b - p.eval(x, -y)).abs() < 1e-12);
        }
    }

    #[test]
    fn entries_match_kernel() {
        let s = HomogeneousPhase::parse("x^3*y + x*y^3").unwrap();
        let spec = KernelSpec::new(&s, 37.0, bump_cutoff(0.8), None);
        let op = spec.discretize(Sector::Full, &ResolutionPolicy::default()).unwrap();
        let w = op.col_grid.weight();
        for &(i, j) in &[(3, 5), (100, 200), (255, 17)] {
            let want = spec.eval(op.row_grid.point(i), op.col_grid.point(j)) * w;
            assert!((op.entry(i, j) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_frequency_is_rank_one() {
        let s = HomogeneousPhase::parse("x*y").unwrap();
        let op = discretize_t(&s, &bump_cutoff(1.0), 0.0, &ResolutionPolicy::default()).unwrap();
        let (r, c) = (op.rows(), op.cols());
        // All 2x2 minors vanish.
        for &(i, k, j, l) in &[(0, r / 2, 1, c / 3), (10, 40, 100, 200)] {
            let m = op.entry(i, j) * op.entry(k, l) - op.entry(i, l) * op.entry(k, j);
            assert!(m.norm() < 1e-18);
        }
    }

    #[test]
    fn ones_reproduce_row_quadrature() {
        let s = HomogeneousPhase::parse("x*y").unwrap();
        let spec = KernelSpec::new(&s, 20.0, bump_cutoff(1.0), None);
        let op = spec.discretize(Sector::Full, &ResolutionPolicy::default()).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); op.cols()];
        let rowsum = op.apply(&ones);
        let rule = oio_core::quadrature::GaussLegendre::new(16);
        for i in [0usize, 64, 128, 200] {
            let x = op.row_grid.point(i);
            let want: Complex64 = rule.composite(-1.0, 1.0, 64, |y| spec.eval(x, y));
            assert!((rowsum[i] - want).norm() < 1e-10, "row {i}");
        }
    }

    #[test]
    fn adjoint_is_transposed_phase_at_negative_frequency() {
        let s = HomogeneousPhase::parse("x^2*y + 3*x*y^2").unwrap();
        let c = SmoothCutoff::tensor_bump((0.2, -0.1), (0.7, 0.7));
        let policy = ResolutionPolicy::default();
        let a = discretize_t(&s, &c, 50.0, &policy).unwrap();
        let ct = SmoothCutoff::tensor_bump((-0.1, 0.2), (0.7, 0.7));
        let b = discretize_t(&s.transpose(), &ct, -50.0, &policy).unwrap();
        let adj = a.adjoint();
        assert_eq!(adj.rows(), b.rows());
        for (u, v) in adj.entries().iter().zip(b.entries()) {
            assert!((u - v).norm() < 1e-14);
        }
    }

    #[test]
    fn nyquist_and_budget() {
        let s = HomogeneousPhase::parse("x*y").unwrap();
        let spec = KernelSpec::new(&s, 4096.0, bump_cutoff(0.875), None);
        let policy = ResolutionPolicy::default();
        assert!(matches!(spec.grids(Sector::Full, &policy), Err(LabError::MemoryBudget { .. })));
        let (r, c) = spec.grids(Sector::Even, &policy).unwrap();
        assert_eq!((r.count, c.count), (4096, 4096));
        assert!(r.weight() * 4096.0 * 0.875 <= FRAC_PI_4);
        let coarse = Grid1D::new(-0.875, 0.875, 1024).unwrap();
        assert!(matches!(
            spec.discretize_on(coarse, coarse, Sector::Full, &policy),
            Err(LabError::ResolutionTooCoarse { axis: "x", .. })
        ));
        let huge = KernelSpec::new(&s, (1u64 << 20) as f64, bump_cutoff(0.875), None);
        assert!(matches!(huge.discretize(Sector::Even, &policy), Err(LabError::MemoryBudget { .. })));
    }

    #[test]
    fn damping_examples() {
        let s = HomogeneousPhase::parse("x^3*y + x*y^3").unwrap();
        let (_, _, spec) = analyze_damping(&s).unwrap();
        assert_eq!(spec.factor, DampingFactor::Polynomial(BivariatePolynomial::parse("x^2 + y^2").unwrap()));
        let policy = ResolutionPolicy::default();
        let op = discretize_damped(&s, &spec, 0.0, 0.0, &bump_cutoff(1.0), &policy).unwrap();
        let (i, j) = (40, 90);
        let (x, y) = (op.row_grid.point(i), op.col_grid.point(j));
        let want = (x * x + y * y).sqrt() * bump_cutoff(1.0).eval(x, y) * op.col_grid.weight();
        assert!((op.entry(i, j).re - want).abs() < 1e-15);

        let mut negative = spec.clone();
        negative.re_z = oio_core::rational::rat(-1, 2);
        assert!(matches!(
            discretize_damped(&s, &negative, 0.0, 1.0, &bump_cutoff(1.0), &policy),
            Err(LabError::SingularDamping { .. })
        ));
        let away = SmoothCutoff::tensor_bump((2.0, 2.0), (0.5, 0.5));
        assert!(discretize_damped(&s, &negative, 0.0, 1.0, &away, &policy).is_ok());
    }

    #[test]
    fn balanced_damping_is_trivial() {
        // n = 4 with beta = 1 gives a_beta = 0.
        let s = HomogeneousPhase::parse("x^2*y^2 + x*y^3").unwrap();
        let (_, _, spec) = analyze_damping(&s).unwrap();
        assert_eq!(spec.beta, 1);
        assert_eq!(spec.re_z, oio_core::rational::int(0));
        let c = bump_cutoff(0.9);
        let policy = ResolutionPolicy::default();
        let damped = discretize_damped(&s, &spec, 0.0, 64.0, &c, &policy).unwrap();
        let plain = discretize_t(&s, &c, 64.0, &policy).unwrap();
        assert_eq!(damped.entries(), plain.entries());
    }

    #[test]
    fn pedestal_damping() {
        let s = HomogeneousPhase::parse("x^3 - 3*x^2*y + 3*x*y^2 - y^3").unwrap();
        let (_, _, spec) = analyze_damping(&s).unwrap();
        assert!(spec.factor.has_pedestal());
        let d = Damping::from_spec(&spec, 0.0, 8.0);
        let w = d.weight(0.3, 0.1);
        assert!((w.re - (0.5 + 0.2f64).powf(0.5)).abs() < 1e-15);
    }

    #[test]
    fn zero_set_detection() {
        let p = BivariatePolynomial::parse("x^2 - 2*y^2").unwrap();
        // Lines y = ±x/√2.
        assert!(vanishes_on_box(&p, (1.0, 2.0), (0.6, 0.8)));
        assert!(!vanishes_on_box(&p, (1.0, 2.0), (1.5, 2.0)));
        let axis = BivariatePolynomial::parse("x*y^2 + x^3").unwrap();
        assert!(vanishes_on_box(&axis, (-0.1, 0.1), (1.0, 2.0)));
        assert!(!vanishes_on_box(&axis, (0.1, 0.2), (1.0, 2.0)));
        assert!(vanishes_on_box(&BivariatePolynomial::parse("x + y + 1").unwrap(), (-1.0, 0.0), (-1.0, 0.0)));
    }
}
