//! Adaptive and endpoint-singular Gauss–Legendre rules.

use std::ops::{Add, Mul};

use oio_core::quadrature::GaussLegendre;

/// Interval halving until two half-panel estimates agree with the parent to `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: &F, a: f64, b: f64, tol: f64, evals: &mut u64) -> f64 {
    let whole = rule.composite(a, b, 1, f);
    *evals += rule.len() as u64;
    halve(rule, f, a, b, whole, tol, 40, evals)
}

#[allow(clippy::too_many_arguments)]
fn halve<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32, evals: &mut u64) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (rule.composite(a, m, 1, f), rule.composite(m, b, 1, f));
    *evals += 2 * rule.len() as u64;
    let both = l + r;
    if depth == 0 || (both - whole).abs() <= tol {
        return both;
    }
    halve(rule, f, a, m, l, 0.5 * tol, depth - 1, evals) + halve(rule, f, m, b, r, 0.5 * tol, depth - 1, evals)
}

/// `∫_a^b f` where `f ~ |y − a|^{−θ}` (`left`) or `|y − b|^{−θ}`, via `y − s = ±t^{1/(1−θ)}`.
pub fn endpoint_singular<T, F>(rule: &GaussLegendre, f: F, a: f64, b: f64, theta: f64, left: bool, panels: usize) -> T
where
    T: Add<Output = T> + Mul<f64, Output = T> + Default,
    F: Fn(f64) -> T,
{
    if theta <= 0.0 {
        return rule.composite(a, b, panels, f);
    }
    let m = 1.0 / (1.0 - theta);
    let top = (b - a).powf(1.0 / m);
    rule.composite(0.0, top, panels, |t: f64| {
        let d = t.powf(m);
        let y = if left { a + d } else { b - d };
        f(y) * (m * t.powf(m - 1.0))
    })
}

/// Splits `[lo, hi]` at the interior singular points and integrates each piece.
/// `panels(len, θ)` chooses the panel count of a piece.
pub fn split_singular<T, F, P>(rule: &GaussLegendre, f: &F, lo: f64, hi: f64, singular: &[(f64, f64)], panels: P) -> T
where
    T: Add<Output = T> + Mul<f64, Output = T> + Default + Copy,
    F: Fn(f64) -> T,
    P: Fn(f64, f64) -> usize,
{
    let mut cuts: Vec<(f64, f64)> = vec![(lo, 0.0), (hi, 0.0)];
    cuts.extend(singular.iter().copied().filter(|&(s, t)| s > lo && s < hi && t > 0.0));
    for c in cuts.iter_mut() {
        for &(s, t) in singular {
            if s == c.0 && t > c.1 {
                c.1 = t;
            }
        }
    }
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = T::default();
    for w in cuts.windows(2) {
        let ((u, tu), (v, tv)) = (w[0], w[1]);
        if v <= u {
            continue;
        }
        if tu > 0.0 && tv > 0.0 {
            let m = 0.5 * (u + v);
            total = total + endpoint_singular(rule, f, u, m, tu, true, panels(m - u, tu));
            total = total + endpoint_singular(rule, f, m, v, tv, false, panels(v - m, tv));
        } else if tu > 0.0 {
            total = total + endpoint_singular(rule, f, u, v, tu, true, panels(v - u, tu));
        } else {
            total = total + endpoint_singular(rule, f, u, v, tv, false, panels(v - u, tv));
        }
    }
    total
}
