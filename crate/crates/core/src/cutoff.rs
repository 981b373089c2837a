//! Smooth compactly supported cutoffs and the dyadic partition of unity.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// `exp(−1/(1−u²))` for `|u| < 1`, `u = (t − center)/radius`; zero outside.
pub fn bump(t: f64, center: f64, radius: f64) -> f64 {
    let u = (t - center) / radius;
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        libm::exp(-1.0 / s)
    }
}

/// `d/dt bump(t, center, radius)`.
pub fn bump_derivative(t: f64, center: f64, radius: f64) -> f64 {
    let u = (t - center) / radius;
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        -2.0 * u / (s * s) * libm::exp(-1.0 / s) / radius
    }
}

/// Monotone `C^∞` step from 0 at `u = −1` to 1 at `u = 1`: the normalized
/// integral of the bump.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoothstep {
    rule: GaussLegendre,
    panels: usize,
}

impl Default for Smoothstep {
    fn default() -> Self {
        Self { rule: GaussLegendre::new(16), panels: 8 }
    }
}

impl Smoothstep {
    fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.rule.composite(a, b, self.panels, |t| bump(t, 0.0, 1.0))
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u <= -1.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        // Integrating from the nearer end keeps the tiny tails accurate.
        let left = self.integral(-1.0, u);
        let right = self.integral(u, 1.0);
        left / (left + right)
    }
}

/// `ψ`: 1 on `(−∞, 1]`, 0 on `[2, ∞)`, smooth and decreasing in between.
pub fn psi_with(step: &Smoothstep, x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        1.0 - step.eval(2.0 * x - 3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffKind {
    /// `bump(x; cx, rx) · bump(y; cy, ry)`.
    TensorBump,
    /// `ψ(2|x − cx|/rx) · ψ(2|y − cy|/ry)`: identically 1 on the inner half box.
    TensorPlateau,
}

/// The amplitude `φ(x, y)` of an oscillatory operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothCutoff {
    pub kind: CutoffKind,
    pub center: (f64, f64),
    pub radius: (f64, f64),
    step: Smoothstep,
}

impl SmoothCutoff {
    pub fn tensor_bump(center: (f64, f64), radius: (f64, f64)) -> Self {
        Self { kind: CutoffKind::TensorBump, center, radius, step: Smoothstep::default() }
    }

    pub fn tensor_plateau(center: (f64, f64), radius: (f64, f64)) -> Self {
        Self { kind: CutoffKind::TensorPlateau, center, radius, step: Smoothstep::default() }
    }

    fn factor(&self, t: f64, c: f64, r: f64) -> f64 {
        match self.kind {
            CutoffKind::TensorBump => bump(t, c, r),
            CutoffKind::TensorPlateau => psi_with(&self.step, 2.0 * libm::fabs(t - c) / r),
        }
    }

    pub fn x_factor(&self, x: f64) -> f64 {
        self.factor(x, self.center.0, self.radius.0)
    }

    pub fn y_factor(&self, y: f64) -> f64 {
        self.factor(y, self.center.1, self.radius.1)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.x_factor(x) * self.y_factor(y)
    }

    /// Closed support in `x`.
    pub fn support_x(&self) -> (f64, f64) {
        (self.center.0 - self.radius.0, self.center.0 + self.radius.0)
    }

    pub fn support_y(&self) -> (f64, f64) {
        (self.center.1 - self.radius.1, self.center.1 + self.radius.1)
    }

    pub fn is_centered(&self) -> bool {
        self.center == (0.0, 0.0)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            CutoffKind::TensorBump => "tensor_bump",
            CutoffKind::TensorPlateau => "tensor_plateau",
        }
    }
}

/// `Φ(x) = ψ(x) − ψ(2x)` dilated over `j_lo ..= j_hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPartition {
    pub j_lo: i32,
    pub j_hi: i32,
    step: Smoothstep,
}

impl DyadicPartition {
    pub fn new(j_lo: i32, j_hi: i32) -> Result<Self> {
        if j_hi < j_lo {
            return Err(Error::OutOfRange("need j_lo <= j_hi"));
        }
        Ok(Self { j_lo, j_hi, step: Smoothstep::default() })
    }

    pub fn psi(&self, x: f64) -> f64 {
        psi_with(&self.step, x)
    }

    /// `Φ(x)`, supported in `[1/2, 2]`.
    pub fn phi(&self, x: f64) -> f64 {
        if x <= 0.5 || x >= 2.0 {
            0.0
        } else if x <= 1.0 {
            1.0 - self.psi(2.0 * x)
        } else {
            self.psi(x)
        }
    }

    /// `Φ(2^{−j} x)`.
    pub fn phi_j(&self, j: i32, x: f64) -> f64 {
        self.phi(libm::ldexp(x, -j))
    }

    /// The nonzero `(j, Φ(2^{−j}x))` with `j_lo ≤ j ≤ j_hi`; at most two.
    pub fn dyadic_values(&self, x: f64) -> Result<Vec<(i32, f64)>> {
        if !(x > 0.0) {
            return Err(Error::NonpositiveArgument);
        }
        let (_, e) = libm::frexp(x);
        // x = m · 2^e with m in [1/2, 1), so 2^{-j}x lands in (1/2, 2) only for j near e - 1.
        let mut out = Vec::new();
        for j in (e - 2)..=(e + 1) {
            if j < self.j_lo || j > self.j_hi {
                continue;
            }
            let v = self.phi_j(j, x);
            if v != 0.0 {
                out.push((j, v));
            }
        }
        Ok(out)
    }

    /// `Σ_j Φ(2^{−j}x)` over the partition's range.
    pub fn sum(&self, x: f64) -> f64 {
        self.dyadic_values(x).map(|v| v.iter().map(|(_, p)| p).sum()).unwrap_or(0.0)
    }
}
