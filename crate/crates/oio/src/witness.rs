//! Growth of `Wf(x) = ∫ e^{i(x−y)^n} |x (x−y)^{n−3}|^{1/2} f(y) dy` on translated indicators.

use std::f64::consts::PI;

use num_complex::Complex64;
use oio_core::quadrature::GaussLegendre;
use serde::Serialize;

use crate::decay::least_squares;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub n: u32,
    pub ns: Vec<f64>,
    /// `min |Wf|` over the observation window.
    pub min_values: Vec<f64>,
    pub f_norms: Vec<f64>,
    /// `‖Wf‖_{L²(window)} / ‖f‖₂`.
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Half the power of `x` in the damping factor.
    pub expected_slope: f64,
}

/// Width of the indicator `(N, N + (π/16)^{1/n})`.
pub fn indicator_width(n: u32) -> f64 {
    (PI / 16.0).powf(1.0 / n as f64)
}

/// Observation window `[N + (π/8)^{1/n}, N + (π/4)^{1/n}]`.
pub fn window(n: u32, big_n: f64) -> (f64, f64) {
    let e = 1.0 / n as f64;
    (big_n + (PI / 8.0).powf(e), big_n + (PI / 4.0).powf(e))
}

pub fn apply_w(n: u32, big_n: f64, x: f64, rule: &GaussLegendre) -> Complex64 {
    let delta = indicator_width(n);
    rule.composite(big_n, big_n + delta, 8, |y: f64| {
        let d = x - y;
        let amp = (x * d.powi(n as i32 - 3)).abs().sqrt();
        Complex64::from_polar(amp, d.powi(n as i32))
    })
}

pub fn unboundedness_witness(n: u32, ladder: &[f64], samples: usize) -> Result<WitnessReport> {
    if n < 3 {
        return Err(LabError::Invalid("the witness needs n >= 3".into()));
    }
    if ladder.len() < 2 || samples < 2 {
        return Err(LabError::Invalid("need at least two ladder points and two samples".into()));
    }
    let rule = GaussLegendre::new(16);
    let delta = indicator_width(n);
    let (mut min_values, mut f_norms, mut ratios) = (Vec::new(), Vec::new(), Vec::new());
    for &big_n in ladder {
        let (a, b) = window(n, big_n);
        let h = (b - a) / (samples - 1) as f64;
        let vals: Vec<f64> = (0..samples).map(|i| apply_w(n, big_n, a + i as f64 * h, &rule).norm()).collect();
        min_values.push(vals.iter().cloned().fold(f64::INFINITY, f64::min));
        // Trapezoid rule for ‖Wf‖² on the window.
        let sq: f64 = vals.iter().map(|v| v * v).sum::<f64>() - 0.5 * (vals[0].powi(2) + vals[samples - 1].powi(2));
        let f_norm = delta.sqrt();
        f_norms.push(f_norm);
        ratios.push((sq * h).sqrt() / f_norm);
    }
    let xs: Vec<f64> = ladder.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = min_values.iter().map(|v| v.ln()).collect();
    let (slope, intercept, stderr) = least_squares(&xs, &ys);
    Ok(WitnessReport { n, ns: ladder.to_vec(), min_values, f_norms, ratios, slope, intercept, stderr, expected_slope: 0.5 })
}
