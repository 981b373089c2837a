//! Arbitrary-precision rationals and the handful of helpers the rest of the
//! crate needs on top of `num-rational`.

use alloc::string::{String, ToString};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `"p/q"`, or `"p"` for integers.
pub fn to_text(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled quotient.
        let n = value.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = value.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Parses `"p"`, `"-p"` or `"p/q"` with `q > 0`.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if !den.is_positive() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Conjugate exponent `p' = p / (p − 1)`; `None` for `p = 1`.
pub fn conjugate(p: &Rational) -> Option<Rational> {
    let d = p - Rational::one();
    if d.is_zero() {
        None
    } else {
        Some(p / d)
    }
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for text in ["3/2", "-7", "0", "12/5"] {
            assert_eq!(to_text(&parse(text).unwrap()), text);
        }
        assert_eq!(parse("6/4"), Some(rat(3, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("1/-2"), None);
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(&rat(4, 3)), Some(int(4)));
        assert_eq!(conjugate(&int(2)), Some(int(2)));
        assert_eq!(conjugate(&int(1)), None);
    }
}
