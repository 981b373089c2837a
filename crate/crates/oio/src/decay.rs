//! Decay-rate fits of `‖T_λ‖` along a dyadic ladder of frequencies.

use oio_core::cutoff::SmoothCutoff;
use oio_core::exponents::sharp_lp_range;
use oio_core::rational::{int, to_f64};
use oio_core::{DampingSpec, HomogeneousPhase, Rational};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::norms::{lp_norm_lower_bound, operator_norm_l2, NormMethod, TrialFamily};
use crate::operator::{damped_kernel, KernelSpec, ResolutionPolicy};
use crate::report::{option_rational_text, rational_text, LadderRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    SingularValue,
    TrialLowerBound,
}

impl Estimator {
    pub fn method(self) -> NormMethod {
        match self {
            Estimator::SingularValue => NormMethod::SingularValue,
            Estimator::TrialLowerBound => NormMethod::TrialLowerBound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub phase: String,
    #[serde(serialize_with = "rational_text")]
    pub p: Rational,
    pub damping: Option<String>,
    pub cutoff: String,
    pub method: NormMethod,
    pub lambdas: Vec<f64>,
    pub norms: Vec<f64>,
    /// Row count of the largest matrix built at each λ.
    pub resolutions: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// `None` when `p` is outside the range where a rate is known.
    #[serde(serialize_with = "option_rational_text")]
    pub theory_slope: Option<Rational>,
}

impl DecayReport {
    pub fn ladder_rows(&self) -> Vec<LadderRow> {
        self.lambdas
            .iter()
            .zip(&self.norms)
            .zip(&self.resolutions)
            .map(|((&lambda, &norm), &resolution)| LadderRow { lambda, norm, method: self.method.name().into(), resolution })
            .collect()
    }

    /// `|slope − theory| ≤ tol`; false when no theory slope applies.
    pub fn agrees_with_theory(&self, tol: f64) -> bool {
        self.theory_slope.as_ref().is_some_and(|t| (self.slope - to_f64(t)).abs() <= tol)
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`, with the standard error of the slope.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if xs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, intercept, stderr)
}

/// Rate from the exponent formulas: `−1/n` inside the sharp range, `−1/(2(β+1))` when damped.
pub fn theory_slope(phase: &HomogeneousPhase, p: &Rational, damping: Option<&DampingSpec>) -> Option<Rational> {
    match damping {
        Some(spec) => Some(-spec.decay_exponent.clone()),
        None => {
            let range = sharp_lp_range(phase).ok()?;
            range.contains(p).then(|| -(Rational::from_integer(1.into()) / int(phase.degree() as i64)))
        }
    }
}

/// `2^k` ladder from `lo` to `hi` in steps of `step`.
pub fn dyadic_ladder(lo: i32, hi: i32, step: i32) -> Result<Vec<f64>> {
    if step <= 0 || hi < lo {
        return Err(LabError::Invalid("ladder needs lo <= hi and step > 0".into()));
    }
    Ok((lo..=hi).step_by(step as usize).map(|k| 2f64.powi(k)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayOptions {
    pub estimator: Estimator,
    pub policy: ResolutionPolicy,
    pub tol: f64,
    /// Imaginary part of the damping exponent.
    pub z_im: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { estimator: Estimator::SingularValue, policy: ResolutionPolicy::default(), tol: 1e-6, z_im: 0.0 }
    }
}

/// One ladder entry: the norm and the largest row count used.
pub fn norm_at(spec: &KernelSpec, p: &Rational, options: &DecayOptions) -> Result<(f64, usize)> {
    let mut best = 0.0f64;
    let mut resolution = 0;
    // Sectors are built one at a time so only one matrix is alive.
    for &sector in spec.sectors() {
        let op = spec.discretize(sector, &options.policy)?;
        resolution = resolution.max(op.rows());
        let v = match options.estimator {
            Estimator::SingularValue => operator_norm_l2(&op, options.tol)?.value,
            Estimator::TrialLowerBound => {
                let kmax = (op.col_grid.count as f64).log2() as i32;
                let freqs = [0.0];
                let family = TrialFamily::dyadic_bumps(&op.col_grid, -1, kmax, 5, &freqs);
                lp_norm_lower_bound(&op, p, &family)?.value
            }
        };
        best = best.max(v);
    }
    Ok((best, resolution))
}

pub fn decay_fit(
    phase: &HomogeneousPhase,
    p: &Rational,
    damping: Option<&DampingSpec>,
    ladder: &[f64],
    cutoff: &SmoothCutoff,
    options: &DecayOptions,
) -> Result<DecayReport> {
    if ladder.len() < 5 {
        return Err(LabError::Invalid("decay fits need at least five ladder points".into()));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) || ladder.iter().any(|l| !(*l > 0.0) || l.log2().fract() != 0.0) {
        return Err(LabError::Invalid("ladder must be strictly increasing powers of two".into()));
    }
    if options.estimator == Estimator::SingularValue && p != &int(2) {
        return Err(LabError::Invalid("the singular-value estimator needs p = 2".into()));
    }
    let mut norms = Vec::with_capacity(ladder.len());
    let mut resolutions = Vec::with_capacity(ladder.len());
    let mut damping_label = None;
    for &lambda in ladder {
        let spec = match damping {
            Some(d) => damped_kernel(phase, d, options.z_im, lambda, cutoff)?,
            None => KernelSpec::new(phase, lambda, cutoff.clone(), None),
        };
        damping_label = spec.damping.as_ref().map(|d| d.description());
        let (v, r) = norm_at(&spec, p, options)?;
        norms.push(v);
        resolutions.push(r);
    }
    let xs: Vec<f64> = ladder.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (slope, intercept, stderr) = least_squares(&xs, &ys);
    Ok(DecayReport {
        phase: phase.to_string(),
        p: p.clone(),
        damping: damping_label,
        cutoff: cutoff.name().to_string(),
        method: options.estimator.method(),
        lambdas: ladder.to_vec(),
        norms,
        resolutions,
        slope,
        intercept,
        stderr,
        theory_slope: theory_slope(phase, p, damping),
    })
}
