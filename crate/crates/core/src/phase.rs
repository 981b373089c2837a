//! Homogeneous phases `S(x, y) = Σ a_k x^{n-k} y^k`.

use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousPhase {
    degree: u32,
    coeffs: Vec<Rational>,
}

impl HomogeneousPhase {
    /// `coeffs[k]` multiplies `x^{n-k} y^k`; there must be `n + 1` of them.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::NotHomogeneous);
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self { degree: (coeffs.len() - 1) as u32, coeffs })
    }

    pub fn from_polynomial(poly: &BivariatePolynomial) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let n = poly.homogeneity().ok_or(Error::NotHomogeneous)?;
        if n == 0 {
            return Err(Error::NotHomogeneous);
        }
        let coeffs = (0..=n).map(|k| poly.coeff(n - k, k)).collect();
        Ok(Self { degree: n, coeffs })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_polynomial(&BivariatePolynomial::parse(text)?)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: u32) -> &Rational {
        &self.coeffs[k as usize]
    }

    /// All mixed coefficients `a_1 .. a_{n-1}` vanish.
    pub fn is_degenerate(&self) -> bool {
        self.mixed_indices().next().is_none()
    }

    fn mixed_indices(&self) -> impl Iterator<Item = u32> + '_ {
        (1..self.degree).filter(|&k| !self.coeffs[k as usize].is_zero())
    }

    pub fn k_extremes(&self) -> Result<(u32, u32)> {
        let k_min = self.mixed_indices().next().ok_or(Error::DegeneratePhase)?;
        let k_max = self.mixed_indices().last().ok_or(Error::DegeneratePhase)?;
        Ok((k_min, k_max))
    }

    pub fn to_polynomial(&self) -> BivariatePolynomial {
        let n = self.degree;
        BivariatePolynomial::from_terms(
            self.coeffs.iter().enumerate().map(|(k, c)| ((n - k as u32, k as u32), c.clone())),
        )
    }

    /// `S(y, x)`, which sends `a_k` to `a_{n-k}`.
    pub fn transpose(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self { degree: self.degree, coeffs }
    }

    pub fn mixed_hessian(&self) -> BivariatePolynomial {
        self.to_polynomial().mixed_hessian()
    }
}

impl fmt::Display for HomogeneousPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_polynomial().fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    #[test]
    fn k_extremes_examples() {
        assert_eq!(HomogeneousPhase::parse("x^3*y + x*y^3").unwrap().k_extremes().unwrap(), (1, 3));
        assert_eq!(HomogeneousPhase::parse("x^2*y^2").unwrap().k_extremes().unwrap(), (2, 2));
        let flat = HomogeneousPhase::parse("x^4 + y^4").unwrap();
        assert!(flat.is_degenerate());
        assert_eq!(flat.k_extremes(), Err(Error::DegeneratePhase));
    }

    #[test]
    fn rejects_inhomogeneous() {
        assert_eq!(HomogeneousPhase::parse("x^2*y + y^2"), Err(Error::NotHomogeneous));
        assert_eq!(HomogeneousPhase::parse("x - x"), Err(Error::ZeroPolynomial));
        assert_eq!(HomogeneousPhase::parse("7"), Err(Error::NotHomogeneous));
    }

    #[test]
    fn transpose_reverses_coefficients() {
        let s = HomogeneousPhase::parse("2*x^3*y - x*y^3 + y^4").unwrap();
        assert_eq!(s.transpose().to_polynomial(), s.to_polynomial().transpose());
    }

    pub(crate) fn arb_phase(max_degree: u32) -> impl Strategy<Value = HomogeneousPhase> {
        (2..=max_degree)
            .prop_flat_map(|n| proptest::collection::vec((-5i64..=5, 1i64..=4), (n + 1) as usize))
            .prop_filter_map("nonzero", |cs| {
                HomogeneousPhase::new(cs.into_iter().map(|(a, b)| crate::rational::rat(a, b)).collect()).ok()
            })
    }

    proptest! {
        #[test]
        fn round_trips_through_polynomial(s in arb_phase(10)) {
            let p = s.to_polynomial();
            prop_assert_eq!(HomogeneousPhase::from_polynomial(&p).unwrap(), s);
        }

        #[test]
        fn k_extremes_consistency(s in arb_phase(10)) {
            prop_assume!(!s.is_degenerate());
            let n = s.degree();
            let (lo, hi) = s.k_extremes().unwrap();
            prop_assert!(1 <= lo && lo <= hi && hi < n);
            prop_assert!(!s.coeff(lo).is_zero());
            prop_assert!(!s.coeff(hi).is_zero());
            for k in (1..lo).chain(hi + 1..n) {
                prop_assert!(s.coeff(k).is_zero());
            }
        }

        #[test]
        fn euler_identity(s in arb_phase(10)) {
            let p = s.to_polynomial();
            let x = BivariatePolynomial::monomial(int(1), 1, 0);
            let y = BivariatePolynomial::monomial(int(1), 0, 1);
            let lhs = x.mul(&p.derivative_x()).add(&y.mul(&p.derivative_y()));
            prop_assert_eq!(lhs, p.scale(&int(s.degree() as i64)));
        }

        #[test]
        fn mixed_partials_commute(s in arb_phase(10)) {
            let p = s.to_polynomial();
            prop_assert_eq!(p.derivative_x().derivative_y(), p.derivative_y().derivative_x());
            let h = p.mixed_hessian();
            if !h.is_zero() {
                prop_assert_eq!(h.homogeneity(), Some(s.degree() - 2));
            }
        }

        #[test]
        fn print_parse_round_trip(s in arb_phase(10)) {
            let p = s.to_polynomial();
            let text = alloc::format!("{p}");
            prop_assert_eq!(BivariatePolynomial::parse(&text).unwrap(), p);
        }
    }
}
