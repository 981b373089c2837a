//! Closed-form exponents: sharp `L^p` ranges, damping exponents, endpoint
//! estimates and the fractional-integral and Pitt relations.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::phase::HomogeneousPhase;
use crate::rational::{self, conjugate, int, Rational};

/// Closed interval `[p_lo, p_hi]` with `1 < p_lo ≤ p_hi < ∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LpRange {
    pub p_lo: Rational,
    pub p_hi: Rational,
}

impl LpRange {
    pub fn new(p_lo: Rational, p_hi: Rational) -> Result<Self> {
        if p_lo <= Rational::one() || p_hi < p_lo {
            return Err(Error::OutOfRange("need 1 < p_lo <= p_hi"));
        }
        Ok(Self { p_lo, p_hi })
    }

    pub fn contains(&self, p: &Rational) -> bool {
        &self.p_lo <= p && p <= &self.p_hi
    }
}

pub fn sharp_lp_range(phase: &HomogeneousPhase) -> Result<LpRange> {
    let (k_min, k_max) = phase.k_extremes()?;
    let n = int(phase.degree() as i64);
    let lo = &n / (&n - int(k_min as i64));
    let hi = &n / (&n - int(k_max as i64));
    LpRange::new(lo, hi)
}

/// Range for the operator with `|x|^{m1}`-type and `|y|^{m2}`-type exponents.
pub fn sharp_lp_range_m(phase: &HomogeneousPhase, m1: u32, m2: u32) -> Result<LpRange> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::OutOfRange("m1 and m2 must be positive"));
    }
    let (k_min, k_max) = phase.k_extremes()?;
    let n = phase.degree() as i64;
    let edge = |k: u32| {
        let k = k as i64;
        rational::rat(k * m2 as i64, (n - k) * m1 as i64) + Rational::one()
    };
    LpRange::new(edge(k_min), edge(k_max))
}

/// Source exponent `p = 2(n − k_min) / (2n − 3k_min)` of the `L^p → L²` bound.
pub fn l2_source_exponent(phase: &HomogeneousPhase) -> Result<Rational> {
    let (k_min, _) = phase.k_extremes()?;
    let n = phase.degree() as i64;
    let k = k_min as i64;
    if 2 * k > n {
        return Err(Error::OutOfHypothesis("k_min > n/2"));
    }
    Ok(rational::rat(2 * (n - k), 2 * n - 3 * k))
}

/// Undamped `L²` decay rate `1/n`, valid when `2` lies in the sharp range.
pub fn l2_decay_exponent(phase: &HomogeneousPhase) -> Result<Rational> {
    let range = sharp_lp_range(phase)?;
    if !range.contains(&int(2)) {
        return Err(Error::OutOfHypothesis("2 is outside the sharp range"));
    }
    Ok(rational::rat(1, phase.degree() as i64))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DampingExponent {
    pub a_beta: Rational,
    pub decay: Rational,
}

/// `a_β = (n − 2(β+1)) / (2(β+1)(n − β − 2))` and decay `1/(2(β+1))`.
pub fn damping_exponent(n: u32, beta: u32) -> Result<DampingExponent> {
    if n < 2 || beta > n - 2 {
        return Err(Error::OutOfRange("need 0 <= beta <= n - 2"));
    }
    if beta == n - 2 {
        return Err(Error::UndefinedExponent);
    }
    let (n, b) = (n as i64, beta as i64);
    let a_beta = rational::rat(n - 2 * (b + 1), 2 * (b + 1) * (n - b - 2));
    Ok(DampingExponent { a_beta, decay: rational::rat(1, 2 * (b + 1)) })
}

/// `(p, decay) = ((k + l) / k, 1 / (k + l))`.
pub fn endpoint_estimate(k: u32, l: u32) -> Result<(Rational, Rational)> {
    if k == 0 || l == 0 {
        return Err(Error::OutOfRange("k and l must be positive"));
    }
    let s = (k + l) as i64;
    Ok((rational::rat(s, k as i64), rational::rat(1, s)))
}

/// `1 < p ≤ q < ∞`, `0 ≤ α < n/q`, `0 ≤ β < n/p′` and `n/p + n/q + β − α = n`.
pub fn pitt_exponents(n_dim: u32, p: &Rational, q: &Rational, alpha: &Rational, beta: &Rational) -> bool {
    let n = int(n_dim as i64);
    if n_dim == 0 || p <= &Rational::one() || q < p {
        return false;
    }
    let Some(p_conj) = conjugate(p) else { return false };
    if alpha.is_negative() || beta.is_negative() {
        return false;
    }
    if alpha >= &(&n / q) || beta >= &(&n / &p_conj) {
        return false;
    }
    &n / p + &n / q + beta - alpha == n
}

/// Target exponent `q` with `1/p = 1/q + (b − a)/b`.
pub fn fractional_mapping(a: &Rational, b: &Rational, p: &Rational) -> Result<Rational> {
    if a <= &Rational::one() || b < a {
        return Err(Error::OutOfRange("need b >= a > 1"));
    }
    if p <= &Rational::one() {
        return Err(Error::OutOfRange("need p > 1"));
    }
    let gap = (b - a) / b;
    let inv_q = Rational::one() / p - gap;
    if !inv_q.is_positive() {
        return Err(Error::OutOfRange("need p < b/(b - a)"));
    }
    Ok(Rational::one() / inv_q)
}

/// `[p_hi′, p_lo′]`.
pub fn dual_range(range: &LpRange) -> LpRange {
    let lo = conjugate(&range.p_hi).expect("p_hi > 1");
    let hi = conjugate(&range.p_lo).expect("p_lo > 1");
    LpRange { p_lo: lo, p_hi: hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn phase(text: &str) -> HomogeneousPhase {
        HomogeneousPhase::parse(text).unwrap()
    }

    fn range(lo: Rational, hi: Rational) -> LpRange {
        LpRange::new(lo, hi).unwrap()
    }

    #[test]
    fn sharp_range_examples() {
        assert_eq!(sharp_lp_range(&phase("x^3*y + x*y^3")).unwrap(), range(rat(4, 3), int(4)));
        assert_eq!(sharp_lp_range(&phase("x^2*y^2")).unwrap(), range(int(2), int(2)));
        assert_eq!(sharp_lp_range(&phase("x*y")).unwrap(), range(int(2), int(2)));
        assert_eq!(sharp_lp_range(&phase("x^4 + y^4")), Err(Error::DegeneratePhase));
    }

    #[test]
    fn sharp_range_m_examples() {
        assert_eq!(sharp_lp_range_m(&phase("x^2*y^2"), 1, 2).unwrap(), range(int(3), int(3)));
        assert_eq!(sharp_lp_range_m(&phase("x^3*y + x*y^3"), 2, 1).unwrap(), range(rat(7, 6), rat(5, 2)));
    }

    #[test]
    fn l2_source_examples() {
        assert_eq!(l2_source_exponent(&phase("x^2*y + x*y^2")).unwrap(), rat(4, 3));
        assert_eq!(l2_source_exponent(&phase("x*y")).unwrap(), int(2));
        assert_eq!(l2_source_exponent(&phase("x^2*y^2")).unwrap(), int(2));
        assert!(matches!(l2_source_exponent(&phase("x*y^3")), Err(Error::OutOfHypothesis(_))));
    }

    #[test]
    fn damping_exponent_examples() {
        assert_eq!(damping_exponent(4, 0).unwrap(), DampingExponent { a_beta: rat(1, 2), decay: rat(1, 2) });
        assert_eq!(damping_exponent(6, 2).unwrap().a_beta, int(0));
        assert_eq!(damping_exponent(6, 1).unwrap(), DampingExponent { a_beta: rat(1, 6), decay: rat(1, 4) });
        assert_eq!(damping_exponent(5, 3), Err(Error::UndefinedExponent));
    }

    #[test]
    fn endpoint_examples() {
        assert_eq!(endpoint_estimate(1, 2).unwrap(), (int(3), rat(1, 3)));
        assert_eq!(endpoint_estimate(1, 1).unwrap(), (int(2), rat(1, 2)));
        assert_eq!(endpoint_estimate(2, 2).unwrap(), (int(2), rat(1, 4)));
    }

    #[test]
    fn pitt_examples() {
        assert!(pitt_exponents(1, &int(2), &int(2), &rat(1, 4), &rat(1, 4)));
        assert!(pitt_exponents(1, &int(2), &int(2), &int(0), &int(0)));
        assert!(!pitt_exponents(1, &int(2), &int(2), &rat(3, 5), &rat(3, 5)));
    }

    #[test]
    fn fractional_examples() {
        assert_eq!(fractional_mapping(&int(2), &int(4), &rat(4, 3)).unwrap(), int(4));
        assert_eq!(fractional_mapping(&int(3), &int(3), &rat(5, 2)).unwrap(), rat(5, 2));
        assert!(matches!(fractional_mapping(&int(2), &int(4), &int(2)), Err(Error::OutOfRange(_))));
        assert!(matches!(fractional_mapping(&int(2), &int(4), &int(1)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_range(&range(rat(4, 3), int(4))), range(rat(4, 3), int(4)));
        assert_eq!(dual_range(&range(rat(3, 2), rat(3, 2))), range(int(3), int(3)));
        assert_eq!(dual_range(&range(int(2), int(2))), range(int(2), int(2)));
    }

    #[test]
    fn a_beta_sign_law() {
        for n in 3..=12u32 {
            for beta in 0..n - 2 {
                let a = damping_exponent(n, beta).unwrap().a_beta;
                let twice = 2 * beta as i64;
                let mid = n as i64 - 2;
                assert_eq!(a.is_positive(), twice < mid, "n={n} beta={beta}");
                assert_eq!(a.is_zero(), twice == mid, "n={n} beta={beta}");
                assert_eq!(a.is_negative(), twice > mid, "n={n} beta={beta}");
            }
        }
    }

    #[test]
    fn two_in_range_iff_k_straddles_half() {
        for n in 2..=8u32 {
            for k_min in 1..n {
                for k_max in k_min..n {
                    let mut cs = alloc::vec![int(0); n as usize + 1];
                    cs[k_min as usize] = int(1);
                    cs[k_max as usize] = int(1);
                    let s = HomogeneousPhase::new(cs).unwrap();
                    let inside = sharp_lp_range(&s).unwrap().contains(&int(2));
                    assert_eq!(inside, 2 * k_min <= n && n <= 2 * k_max);
                }
            }
        }
    }

    fn arb_nondegenerate() -> impl Strategy<Value = HomogeneousPhase> {
        (2u32..=9)
            .prop_flat_map(|n| proptest::collection::vec(-3i64..=3, (n + 1) as usize))
            .prop_filter_map("non-degenerate", |cs| {
                let s = HomogeneousPhase::new(cs.into_iter().map(int).collect()).ok()?;
                (!s.is_degenerate()).then_some(s)
            })
    }

    proptest! {
        #[test]
        fn transpose_is_dual(s in arb_nondegenerate()) {
            let r = sharp_lp_range(&s).unwrap();
            prop_assert_eq!(sharp_lp_range(&s.transpose()).unwrap(), dual_range(&r));
        }

        #[test]
        fn unit_m_matches_plain_range(s in arb_nondegenerate()) {
            prop_assert_eq!(sharp_lp_range_m(&s, 1, 1).unwrap(), sharp_lp_range(&s).unwrap());
        }

        #[test]
        fn vertex_endpoint_rate_is_one_over_n(s in arb_nondegenerate()) {
            let (k_min, _) = s.k_extremes().unwrap();
            let n = s.degree();
            let (_, decay) = endpoint_estimate(k_min, n - k_min).unwrap();
            prop_assert_eq!(decay, rat(1, n as i64));
        }

        #[test]
        fn fractional_mapping_satisfies_relation(a in 2i64..6, extra in 0i64..4, num in 1i64..40) {
            let (a, b) = (int(a), int(a + extra));
            // p in (1, b/(b - a)) sampled on a rational grid
            let p = if extra == 0 {
                Rational::one() + rat(num, 8)
            } else {
                let cap = &b / (&b - &a);
                Rational::one() + (cap - Rational::one()) * rat(num, 41)
            };
            let q = fractional_mapping(&a, &b, &p).unwrap();
            prop_assert_eq!(Rational::one() / &p, Rational::one() / &q + (&b - &a) / &b);
        }
    }
}
