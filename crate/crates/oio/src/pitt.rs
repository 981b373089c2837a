//! Exhaustive comparison of the Pitt validity predicate against integer arithmetic.

use oio_core::exponents::pitt_exponents;
use oio_core::rational::rat;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PittSweep {
    pub checked: usize,
    pub valid: usize,
    pub disagreements: Vec<PittCase>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PittCase {
    pub n: u32,
    /// `p = a/4`, `q = b/4`, `α = c/8`, `β = d/8`.
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl PittCase {
    /// All conditions cleared of denominators: with `p = a/4`, `p′ = a/(a−4)`.
    pub fn integer_oracle(&self) -> bool {
        let n = self.n as i64;
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        a > 4 && b >= a && c >= 0 && d >= 0 && c * b < 32 * n && d * a < 8 * n * (a - 4) && 32 * n * b + 32 * n * a + d * a * b - c * a * b == 8 * n * a * b
    }

    pub fn predicate(&self) -> bool {
        pitt_exponents(self.n, &rat(self.a, 4), &rat(self.b, 4), &rat(self.c, 8), &rat(self.d, 8))
    }
}

/// `p, q ∈ {1, 5/4, …, 6}`, `α, β ∈ {0, 1/8, …, 2}`, `n ∈ 1..=n_max`.
pub fn pitt_sweep(n_max: u32) -> PittSweep {
    let mut checked = 0;
    let mut valid = 0;
    let mut disagreements = Vec::new();
    for n in 1..=n_max {
        for a in 4..=24 {
            for b in 4..=24 {
                for c in 0..=16 {
                    for d in 0..=16 {
                        let case = PittCase { n, a, b, c, d };
                        let want = case.integer_oracle();
                        checked += 1;
                        valid += want as usize;
                        if case.predicate() != want {
                            disagreements.push(case);
                        }
                    }
                }
            }
        }
    }
    PittSweep { checked, valid, disagreements }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(PittCase { n: 1, a: 8, b: 8, c: 2, d: 2 }.integer_oracle());
        assert!(PittCase { n: 1, a: 8, b: 8, c: 0, d: 0 }.integer_oracle());
        // α = 5/8 ≥ 1/2 = n/q.
        assert!(!PittCase { n: 1, a: 8, b: 8, c: 5, d: 5 }.integer_oracle());
    }

    #[test]
    fn sweep_agrees() {
        let s = pitt_sweep(2);
        assert_eq!(s.checked, 2 * 21 * 21 * 17 * 17);
        assert!(s.valid > 20);
        assert!(s.disagreements.is_empty(), "{:?}", &s.disagreements[..s.disagreements.len().min(5)]);
    }
}
