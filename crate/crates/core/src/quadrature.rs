//! Composite Gauss–Legendre quadrature for one-dimensional oscillatory
//! integrals `∫ e^{iλφ(t)} a(t) dt`, and a van der Corput checker.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let (p, pm1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
                dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
                let dz = p / dp;
                z -= dz;
                if libm::fabs(dz) < 1e-16 {
                    break;
                }
            }
            if n == 1 {
                z = 0.0;
                dp = 1.0;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n == 1 {
            weights[0] = 2.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Composite rule over `panels` equal panels of `[a, b]`.
    pub fn composite<F: FnMut(f64) -> T, T: core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T> + Default>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> T {
        let h = (b - a) / panels as f64;
        let mut total = T::default();
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            let mut panel = T::default();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel = panel + f(mid + 0.5 * h * x) * *w;
            }
            total = total + panel * (0.5 * h);
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub estimated_error: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Gauss points per panel.
    pub order: usize,
    pub max_evaluations: u64,
    /// Known bound on `|φ'|` over the interval; sampled when absent.
    pub max_phase_derivative: Option<f64>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { order: 8, max_evaluations: 1 << 24, max_phase_derivative: None }
    }
}

/// `max |φ'|` from difference quotients on a fine uniform grid, with a 25% margin.
pub fn sample_max_derivative<P: Fn(f64) -> f64>(phase: &P, a: f64, b: f64) -> f64 {
    let samples = 4096;
    let h = (b - a) / samples as f64;
    let mut prev = phase(a);
    let mut max = 0.0f64;
    for k in 1..=samples {
        let cur = phase(a + k as f64 * h);
        max = max.max(libm::fabs(cur - prev) / h);
        prev = cur;
    }
    1.25 * max
}

/// Panel count before any doubling: at least eight per oscillation of `λφ`.
pub fn initial_panels(lambda: f64, max_derivative: f64, length: f64) -> usize {
    let oscillations = libm::ceil(libm::fabs(lambda) * max_derivative * length / (2.0 * PI));
    ((8.0 * oscillations) as usize).max(8)
}

/// `∫_a^b e^{iλφ(t)} a(t) dt`, doubling the panel count until two successive
/// values differ by less than `tol`.
pub fn oscillatory_integral<P, A>(
    phase: P,
    amplitude: A,
    lambda: f64,
    interval: (f64, f64),
    tol: f64,
    options: QuadratureOptions,
) -> Result<QuadratureResult>
where
    P: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    let (a, b) = interval;
    if !(tol > 0.0) || !(b > a) {
        return Err(Error::OutOfRange("need tol > 0 and a < b"));
    }
    let rule = GaussLegendre::new(options.order);
    let m = options.max_phase_derivative.unwrap_or_else(|| sample_max_derivative(&phase, a, b));
    let mut panels = initial_panels(lambda, m, b - a);
    let integrand = |t: f64| {
        let (s, c) = libm::sincos(lambda * phase(t));
        Complex64::new(c, s) * amplitude(t)
    };
    let mut evaluations = 0u64;
    let eval = |panels: usize, evaluations: &mut u64| -> Result<Complex64> {
        *evaluations += (panels * rule.len()) as u64;
        if *evaluations > options.max_evaluations {
            return Err(Error::BudgetExceeded { evaluations: *evaluations });
        }
        Ok(rule.composite(a, b, panels, integrand))
    };
    let mut prev = eval(panels, &mut evaluations)?;
    loop {
        panels *= 2;
        let cur = eval(panels, &mut evaluations)?;
        let diff = (cur - prev).norm();
        if diff < tol {
            return Ok(QuadratureResult { value: cur, estimated_error: diff, evaluations });
        }
        prev = cur;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VdcReport {
    pub k: u32,
    pub lambdas: Vec<f64>,
    /// `λ^{1/k} |I(λ)|` along the ladder.
    pub scaled: Vec<f64>,
    pub sup: f64,
    /// `(max − min) / |last|` over the ladder entries within a factor 10 of the last λ.
    pub terminal_variation: f64,
    pub evaluations: u64,
}

pub fn vdc_check<P, A>(
    phase: P,
    k: u32,
    ladder: &[f64],
    amplitude: A,
    interval: (f64, f64),
    tol: f64,
    options: QuadratureOptions,
) -> Result<VdcReport>
where
    P: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    if k == 0 || ladder.is_empty() || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("need k >= 1 and an increasing ladder"));
    }
    let mut scaled = Vec::with_capacity(ladder.len());
    let mut evaluations = 0;
    for &lambda in ladder {
        let r = oscillatory_integral(&phase, &amplitude, lambda, interval, tol, options)?;
        evaluations += r.evaluations;
        scaled.push(libm::pow(lambda, 1.0 / k as f64) * r.value.norm());
    }
    let last_lambda = *ladder.last().unwrap_or(&1.0);
    let tail: Vec<f64> = ladder
        .iter()
        .zip(&scaled)
        .filter(|(l, _)| **l * 10.0 >= last_lambda)
        .map(|(_, s)| *s)
        .collect();
    let max = tail.iter().cloned().fold(f64::MIN, f64::max);
    let min = tail.iter().cloned().fold(f64::MAX, f64::min);
    let last = *scaled.last().unwrap_or(&1.0);
    Ok(VdcReport {
        k,
        lambdas: ladder.to_vec(),
        sup: scaled.iter().cloned().fold(0.0, f64::max),
        terminal_variation: (max - min) / libm::fabs(last),
        scaled,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::bump;
    use proptest::prelude::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..=12 {
            let rule = GaussLegendre::new(n);
            let sum: f64 = rule.weights.iter().sum();
            assert!((sum - 2.0).abs() < 1e-14, "n={n}");
            for d in 0..2 * n {
                let got: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(d as i32)).sum();
                let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn zero_frequency_integrates_bump() {
        let r = oscillatory_integral(|t| t * t, |t| bump(t, 0.0, 1.0), 0.0, (-1.0, 1.0), 1e-13, QuadratureOptions::default())
            .unwrap();
        // Independent oracle: tanh-sinh style substitution t = tanh(s) over a long
        // trapezoid, which handles the flat endpoints spectrally.
        let h = 1.0 / 64.0;
        let mut oracle = 0.0;
        for k in -640..=640 {
            let s = k as f64 * h;
            let t = libm::tanh(s);
            let ch = libm::cosh(s);
            oracle += bump(t, 0.0, 1.0) / (ch * ch) * h;
        }
        assert!((r.value.re - oracle).abs() < 1e-12);
        assert!((r.value.re - 0.443_993_816_168).abs() < 1e-9);
        assert!(r.value.im.abs() < 1e-15);
    }

    #[test]
    fn linear_phase_closed_form() {
        let r = oscillatory_integral(|t| t, |_| 1.0, 10.0, (0.0, 1.0), 1e-12, QuadratureOptions::default()).unwrap();
        let exact = (Complex64::new(0.0, 10.0).exp() - 1.0) / Complex64::new(0.0, 10.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn quadratic_phase_matches_oversampled_grid() {
        let lambda = 100.0;
        let r = oscillatory_integral(|t| t * t, |_| 1.0, lambda, (0.0, 1.0), 1e-12, QuadratureOptions::default())
            .unwrap();
        // Oversampled composite Simpson, 2^20 intervals.
        let n = 1 << 20;
        let h = 1.0 / n as f64;
        let f = |t: f64| Complex64::new(0.0, lambda * t * t).exp();
        let mut s = f(0.0) + f(1.0);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s *= h / 3.0;
        assert!((r.value.norm() - s.norm()).abs() < 1e-8);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = QuadratureOptions { max_evaluations: 1000, ..QuadratureOptions::default() };
        let err = oscillatory_integral(|t| t, |_| 1.0, 1e6, (0.0, 1.0), 1e-12, opts).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn convergence_order() {
        let rule = GaussLegendre::new(8);
        let f = |t: f64| libm::exp(t) * libm::cos(3.0 * t);
        let exact = {
            // ∫_0^2 e^t cos 3t dt = [e^t (cos 3t + 3 sin 3t)/10]_0^2
            let g = |t: f64| libm::exp(t) * (libm::cos(3.0 * t) + 3.0 * libm::sin(3.0 * t)) / 10.0;
            g(2.0) - g(0.0)
        };
        let e1 = (rule.composite(0.0, 2.0, 1, f) - exact).abs();
        let e2 = (rule.composite(0.0, 2.0, 2, f) - exact).abs();
        assert!(e1 / e2 >= 16.0 || e2 < 1e-14);
    }

    #[test]
    fn van_der_corput_linear_phase() {
        let ladder: Vec<f64> = (0..8).map(|j| 2f64.powi(j)).collect();
        let r = vdc_check(|t| t, 1, &ladder, |_| 1.0, (0.0, 1.0), 1e-12, QuadratureOptions::default()).unwrap();
        for (l, s) in ladder.iter().zip(&r.scaled) {
            let exact = (Complex64::new(0.0, *l).exp() - 1.0).norm();
            assert!((s - exact).abs() < 1e-9);
            assert!(*s <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn van_der_corput_cubic_phase() {
        let ladder: Vec<f64> = (4..=14).map(|j| 2f64.powi(j)).collect();
        let r = vdc_check(|t| t * t * t, 3, &ladder, |_| 1.0, (0.0, 1.0), 1e-11, QuadratureOptions::default()).unwrap();
        assert!(r.sup.is_finite());
        assert!(r.terminal_variation < 0.05, "variation {}", r.terminal_variation);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn envelope_is_nearly_monotone(c in -0.5f64..0.5, r in 0.3f64..1.0) {
            let amp = move |t: f64| bump(t, c, r);
            let mut prev: Option<f64> = None;
            for j in 2..9 {
                let lambda = 2f64.powi(j);
                let v = oscillatory_integral(|t| t * t, amp, lambda, (c - r, c + r), 1e-12, QuadratureOptions::default())
                    .unwrap()
                    .value
                    .norm();
                if let Some(p) = prev {
                    prop_assert!(v <= 4.0 * p + 1e-12);
                }
                prev = Some(v);
            }
        }
    }
}
