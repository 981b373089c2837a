//! Fractional integrals `W_{a,b} f(x) = ∫ ||x|^a − |y|^a|^{−1/b} f(y) dy` and their dilation behaviour.

use oio_core::cutoff::bump;
use oio_core::quadrature::GaussLegendre;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::grid::{Grid1D, GridFunction};
use crate::integrate::{adaptive, split_singular};

/// The kernel form used by every fractional routine.
pub const INTERPRETATION: &str = "||x|^a - |y|^a|^(-1/b), plain absolute powers";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionalKernel {
    pub a: f64,
    pub b: f64,
}

impl FractionalKernel {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 1.0) || !(b >= a) || !b.is_finite() {
            return Err(LabError::Invalid(format!("need b >= a > 1, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (x.abs().powf(self.a) - y.abs().powf(self.a)).abs().powf(-1.0 / self.b)
    }

    /// Singular `y` at fixed `x` with their exponents.
    pub fn singular_points(&self, x: f64) -> Vec<(f64, f64)> {
        if x == 0.0 {
            vec![(0.0, self.a / self.b)]
        } else {
            vec![(-x.abs(), 1.0 / self.b), (x.abs(), 1.0 / self.b)]
        }
    }

    /// Homogeneity degree `−a/b`.
    pub fn degree(&self) -> f64 {
        -self.a / self.b
    }
}

fn panel_rule(support_len: f64) -> impl Fn(f64, f64) -> usize {
    move |len, _| ((24.0 * len / support_len).ceil() as usize).clamp(2, 96)
}

/// `W_{a,b} f(x)` for `f` supported in `support`.
pub fn fractional_value<F: Fn(f64) -> f64>(k: &FractionalKernel, f: &F, support: (f64, f64), x: f64, rule: &GaussLegendre) -> f64 {
    let g = |y: f64| k.eval(x, y) * f(y);
    split_singular(rule, &g, support.0, support.1, &k.singular_points(x), panel_rule(support.1 - support.0))
}

/// `∫_{cell} K(x, y) dy`, exact up to quadrature near singular points.
fn cell_weight(k: &FractionalKernel, grid: &Grid1D, j: usize, x: f64, rule: &GaussLegendre) -> f64 {
    let h = grid.weight();
    let (lo, hi) = (grid.lo + j as f64 * h, grid.lo + (j + 1) as f64 * h);
    let sing = k.singular_points(x);
    let near = sing.iter().any(|&(s, _)| s > lo - 2.0 * h && s < hi + 2.0 * h);
    if near {
        split_singular(rule, &|y: f64| k.eval(x, y), lo, hi, &sing, |_, _| 2)
    } else {
        k.eval(x, grid.point(j)) * h
    }
}

/// `W_{a,b} f` on the grid of `f`, with `f` piecewise constant on cells.
pub fn fractional_apply(k: &FractionalKernel, f: &GridFunction<f64>) -> GridFunction<f64> {
    use rayon::prelude::*;
    let rule = GaussLegendre::new(8);
    let grid = f.grid;
    let values = (0..grid.count)
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            f.values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| v * cell_weight(k, &grid, j, x, &rule)).sum()
        })
        .collect();
    GridFunction { grid, values }
}

/// `‖W f‖_{L^q(ℝ)}` for `f` supported in `support ⊂ (0, ∞)`.
pub fn output_norm<F: Fn(f64) -> f64 + Sync>(k: &FractionalKernel, f: &F, support: (f64, f64), q: f64) -> f64 {
    let inner = GaussLegendre::new(16);
    let outer = GaussLegendre::new(8);
    let g = |x: f64| fractional_value(k, f, support, x, &inner).abs().powf(q);
    let (lo, hi) = support;
    let far = 8.0 * hi;
    let scale = outer.composite(lo, hi, 8, g).abs().max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let mut evals = 0;
    let mut total = 0.0;
    for (a, b) in [(0.0, lo), (lo, hi), (hi, far)] {
        total += adaptive(&outer, &g, a, b, tol, &mut evals);
    }
    // x = far · u^{−3} maps (far, ∞) onto (0, 1).
    let tail = |u: f64| if u <= 0.0 { 0.0 } else { g(far * u.powi(-3)) * 3.0 * far * u.powi(-4) };
    total += adaptive(&outer, &tail, 0.0, 1.0, tol, &mut evals);
    // W f is even in x.
    (2.0 * total).powf(1.0 / q)
}

/// `‖f‖_{L^p}` for `f` supported in `support`.
pub fn input_norm<F: Fn(f64) -> f64>(f: &F, support: (f64, f64), p: f64) -> f64 {
    GaussLegendre::new(16).composite(support.0, support.1, 64, |x| f(x).abs().powf(p)).powf(1.0 / p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub kernel: FractionalKernel,
    pub p: f64,
    pub q: f64,
    pub ts: Vec<f64>,
    /// `‖W f_t‖_q / ‖f_t‖_p`.
    pub ratios: Vec<f64>,
    /// `max/min − 1`.
    pub drift: f64,
    pub monotone: bool,
    /// `a/b − 1 − 1/q + 1/p`: the predicted power of `t`.
    pub predicted_power: f64,
}

/// Sweeps `f_t(x) = f(tx)` for the unit bump `f` centered at 1 with radius 1/2.
pub fn scaling_sweep(k: &FractionalKernel, p: f64, q: f64, ts: &[f64]) -> Result<ScalingReport> {
    if !(p > 1.0) || !(q > 1.0) || ts.len() < 2 || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(LabError::Invalid("need p, q > 1 and at least two positive dilations".into()));
    }
    if !(q * k.a / k.b > 1.0) {
        return Err(LabError::Invalid("W f is not in L^q at infinity unless q a/b > 1".into()));
    }
    use rayon::prelude::*;
    let ratios: Vec<f64> = ts
        .par_iter()
        .map(|&t| {
            let f = move |x: f64| bump(t * x, 1.0, 0.5);
            let support = (0.5 / t, 1.5 / t);
            output_norm(k, &f, support, q) / input_norm(&f, support, p)
        })
        .collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    Ok(ScalingReport {
        kernel: *k,
        p,
        q,
        ts: ts.to_vec(),
        drift: max / min - 1.0,
        monotone: increasing || decreasing,
        ratios,
        predicted_power: k.a / k.b - 1.0 - 1.0 / q + 1.0 / p,
    })
}

/// `∫ |f(y)| ‖K(·, y)‖_p dy`, finite when `1 < p < b` and `p a/b > 1`.
pub fn minkowski_bound<F: Fn(f64) -> f64>(k: &FractionalKernel, f: &F, support: (f64, f64), p: f64) -> Result<f64> {
    if !(p > 1.0 && p < k.b && p * k.a / k.b > 1.0) {
        return Err(LabError::Invalid("the kernel column is not in L^p".into()));
    }
    let rule = GaussLegendre::new(16);
    // ‖K(·, 1)‖_p^p over x > 0, split at the singular point x = 1.
    let col = |x: f64| k.eval(x, 1.0).powf(p);
    let theta = p / k.b;
    let near: f64 = split_singular(&rule, &col, 0.0, 2.0, &[(1.0, theta)], |_, _| 16);
    let tail = rule.composite(0.0, 1.0, 32, |u: f64| if u <= 0.0 { 0.0 } else { col(2.0 * u.powi(-3)) * 6.0 * u.powi(-4) });
    let unit = (2.0 * (near + tail)).powf(1.0 / p);
    // ‖K(·, y)‖_p = |y|^{1/p − a/b} ‖K(·, 1)‖_p.
    let power = 1.0 / p - k.a / k.b;
    Ok(rule.composite(support.0, support.1, 64, |y: f64| f(y).abs() * y.abs().powf(power)) * unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use oio_core::exponents::fractional_mapping;
    use oio_core::rational::{int, rat, to_f64};

    fn ts() -> Vec<f64> {
        (-3..=3).map(|k| 2f64.powi(k)).collect()
    }

    #[test]
    fn kernel_and_domain() {
        let k = FractionalKernel::new(2.0, 3.0).unwrap();
        assert!((k.eval(2.0, 1.0) - 3f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(k.eval(-2.0, 1.0), k.eval(2.0, -1.0));
        assert!(FractionalKernel::new(1.0, 2.0).is_err());
        assert!(FractionalKernel::new(3.0, 2.0).is_err());
    }

    #[test]
    fn value_against_dense_quadrature() {
        // Away from the support the kernel is smooth, so plain Gauss–Legendre is an oracle.
        let k = FractionalKernel::new(2.0, 3.0).unwrap();
        let f = |y: f64| bump(y, 1.0, 0.5);
        let rule = GaussLegendre::new(16);
        for &x in &[3.0, 0.2, -4.0] {
            let want = GaussLegendre::new(24).composite(0.5, 1.5, 200, |y| k.eval(x, y) * f(y));
            assert!((fractional_value(&k, &f, (0.5, 1.5), x, &rule) - want).abs() < 1e-13);
        }
        // Inside, refine the panel rule instead.
        let x = 1.1;
        let u = fractional_value(&k, &f, (0.5, 1.5), x, &rule);
        let v = fractional_value(&k, &f, (0.5, 1.5), x, &GaussLegendre::new(32));
        assert!((u - v).abs() < 1e-10 * v.abs());
    }

    #[test]
    fn grid_apply_matches_function_value() {
        let k = FractionalKernel::new(2.0, 3.0).unwrap();
        let f = |y: f64| bump(y, 1.0, 0.5);
        let grid = Grid1D::new(-4.0, 4.0, 2048).unwrap();
        let w = fractional_apply(&k, &GridFunction::sample(grid, f));
        let rule = GaussLegendre::new(16);
        for i in [100, 1100, 1300, 1900] {
            let x = grid.point(i);
            let exact = fractional_value(&k, &f, (0.5, 1.5), x, &rule);
            assert!((w.values[i] - exact).abs() < 2e-3 * exact.abs(), "x={x}: {} vs {exact}", w.values[i]);
        }
    }

    #[test]
    fn scaling_invariance_on_the_exponent_line() {
        let k = FractionalKernel::new(2.0, 3.0).unwrap();
        let p = rat(6, 5);
        let q = to_f64(&fractional_mapping(&int(2), &int(3), &p).unwrap());
        assert!((q - 2.0).abs() < 1e-15);
        let r = scaling_sweep(&k, to_f64(&p), q, &ts()).unwrap();
        assert!(r.predicted_power.abs() < 1e-15);
        assert!(r.drift < 1e-2, "{}", r.drift);

        let off = scaling_sweep(&k, to_f64(&p), q + 0.2, &ts()).unwrap();
        assert!(off.drift > 0.1 && off.monotone, "{off:?}");
        // The drift follows t^{predicted_power} across 2^6.
        let want = 64f64.powf(off.predicted_power.abs()) - 1.0;
        assert!((off.drift - want).abs() < 0.01 * want);
    }

    #[test]
    fn equal_exponents_keep_p() {
        let k = FractionalKernel::new(2.0, 2.0).unwrap();
        let p = 1.5;
        assert_eq!(fractional_mapping(&int(2), &int(2), &rat(3, 2)).unwrap(), rat(3, 2));
        let f = |y: f64| bump(y, 1.0, 0.5);
        let bound = minkowski_bound(&k, &f, (0.5, 1.5), p).unwrap();
        let norm = output_norm(&k, &f, (0.5, 1.5), p);
        assert!(norm.is_finite() && bound.is_finite());
        assert!(norm <= bound, "{norm} vs {bound}");
        let r = scaling_sweep(&k, p, p, &ts()).unwrap();
        assert!(r.drift < 1e-2);
    }
}
