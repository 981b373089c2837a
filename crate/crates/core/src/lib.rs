//! Exact algebra and scalar numerics for oscillatory integral operators with
//! homogeneous polynomial phases.
//!
//! Everything on the algebraic side runs over arbitrary-precision rationals:
//! phase parsing, the mixed Hessian `S''_xy`, its normal form
//! `c x^γ y^β Π (y − α_j x)^{m_j} Π Q_j`, and the closed-form exponent
//! formulas built on `k_min`/`k_max`. The numeric side (smooth cutoffs,
//! dyadic partitions, oscillatory quadrature) is pure `f64` on top of `libm`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bivariate;
pub mod cutoff;
pub mod error;
pub mod exponents;
pub mod factor;
pub mod newton;
pub mod phase;
pub mod quadrature;
pub mod rational;
pub mod roots;
pub mod univariate;

pub use bivariate::{Axis, BivariatePolynomial};
pub use error::{Error, ParseError};
pub use exponents::{DampingExponent, LpRange};
pub use factor::{DampingFactor, DampingSpec, HessianFactorization, PhaseCase, QuadraticFactor};
pub use newton::NewtonPolyhedron;
pub use phase::HomogeneousPhase;
pub use rational::Rational;
pub use roots::IsolatedRealRoot;
pub use univariate::UnivariatePolynomial;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
