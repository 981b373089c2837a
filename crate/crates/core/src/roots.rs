//! Square-free decomposition and exact real-root isolation by Sturm sequences.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::univariate::UnivariatePolynomial;

/// A real root of `factor`, isolated in `[lo, hi]`.
///
/// `lo == hi` exactly when the root is rational and was hit exactly; otherwise
/// `factor` changes sign strictly across the interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedRealRoot {
    pub factor: UnivariatePolynomial,
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: u32,
}

impl IsolatedRealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Midpoint after refining to width `2^-64`.
    pub fn to_f64(&self) -> f64 {
        let fine = refine_root(self, &rational::pow(&rational::rat(1, 2), 64));
        rational::to_f64(&((&fine.lo + &fine.hi) / rational::int(2)))
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.lo <= t && t <= &self.hi
    }
}

/// Yun's algorithm. Factors are monic, square-free, pairwise coprime and listed
/// by increasing multiplicity; their product is `g / leading(g)`.
pub fn square_free_decompose(g: &UnivariatePolynomial) -> Result<Vec<(UnivariatePolynomial, u32)>> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let f = g.monic();
    let mut out = Vec::new();
    if f.degree() == Some(0) {
        return Ok(out);
    }
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_rem(&a0).0;
    let c = df.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut mult = 1u32;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let next_b = b.div_rem(&a).0;
        let c = d.div_rem(&a).0;
        d = c.sub(&next_b.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, mult));
        }
        b = next_b;
        mult += 1;
    }
    Ok(out)
}

/// The Sturm chain `p0 = g, p1 = g', p_{k+1} = -rem(p_{k-1}, p_k)`.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<UnivariatePolynomial>,
}

impl SturmSequence {
    pub fn new(g: &UnivariatePolynomial) -> Self {
        let mut chain = Vec::new();
        if g.is_zero() {
            return Self { chain };
        }
        chain.push(g.clone());
        let mut prev = g.clone();
        let mut cur = g.derivative();
        while !cur.is_zero() {
            chain.push(cur.clone());
            let (_, r) = prev.div_rem(&cur);
            prev = cur;
            cur = r.neg();
        }
        Self { chain }
    }

    fn variations<I: Iterator<Item = i8>>(signs: I) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, t: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at(t)))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at_pos_inf()))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at_neg_inf()))
    }

    /// Distinct real roots in `(lo, hi)`; endpoints must not be roots.
    pub fn count(&self, lo: &Rational, hi: &Rational) -> Result<usize> {
        let g = &self.chain[0];
        if g.sign_at(lo) == 0 || g.sign_at(hi) == 0 {
            return Err(Error::EndpointIsRoot);
        }
        Ok(self.variations_at(lo).saturating_sub(self.variations_at(hi)))
    }

    /// Distinct real roots on the whole line.
    pub fn count_all(&self) -> usize {
        self.variations_at_neg_inf().saturating_sub(self.variations_at_pos_inf())
    }
}

pub fn sturm_count(g: &UnivariatePolynomial, lo: &Rational, hi: &Rational) -> Result<usize> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    SturmSequence::new(g).count(lo, hi)
}

/// Isolates the distinct real roots of a square-free polynomial, in increasing order.
fn isolate_square_free(f: &UnivariatePolynomial, multiplicity: u32, out: &mut Vec<IsolatedRealRoot>) {
    if f.degree() == Some(1) {
        let r = -f.coeff(0) / f.coeff(1);
        out.push(IsolatedRealRoot { factor: f.monic(), lo: r.clone(), hi: r, multiplicity });
        return;
    }
    let bound = f.root_bound();
    let mut found = Vec::new();
    bisect(f, &SturmSequence::new(f), -bound.clone(), bound, multiplicity, &mut found);
    let denominators = leading_divisors(f);
    for root in found.iter_mut().filter(|r| !r.is_exact()) {
        if let Some(r) = snap_rational(root, &denominators) {
            *root = IsolatedRealRoot { factor: UnivariatePolynomial::linear_root(r.clone()), lo: r.clone(), hi: r, multiplicity };
        }
    }
    let reduced = reduced_factor(f, &found);
    for root in found.iter_mut().filter(|r| !r.is_exact()) {
        root.factor = reduced.clone();
    }
    found.sort_by(|a, b| a.lo.cmp(&b.lo));
    out.extend(found);
}

fn bisect(
    f: &UnivariatePolynomial,
    sturm: &SturmSequence,
    lo: Rational,
    hi: Rational,
    multiplicity: u32,
    out: &mut Vec<IsolatedRealRoot>,
) {
    let count = sturm.count(&lo, &hi).expect("bisection endpoints avoid roots");
    if count == 0 {
        return;
    }
    if count == 1 {
        out.push(IsolatedRealRoot { factor: f.clone(), lo, hi, multiplicity });
        return;
    }
    let mid = (&lo + &hi) / rational::int(2);
    if f.sign_at(&mid) == 0 {
        out.push(IsolatedRealRoot {
            factor: UnivariatePolynomial::linear_root(mid.clone()),
            lo: mid.clone(),
            hi: mid.clone(),
            multiplicity,
        });
        let rest = f.div_rem(&UnivariatePolynomial::linear_root(mid.clone())).0;
        if rest.degree().unwrap_or(0) == 0 {
            return;
        }
        let rest_sturm = SturmSequence::new(&rest);
        bisect(&rest, &rest_sturm, lo, mid.clone(), multiplicity, out);
        bisect(&rest, &rest_sturm, mid, hi, multiplicity, out);
        return;
    }
    bisect(f, sturm, lo, mid.clone(), multiplicity, out);
    bisect(f, sturm, mid, hi, multiplicity, out);
}

/// Positive divisors of the leading coefficient of `f` once its coefficients
/// are cleared to coprime integers; empty when that coefficient is too large
/// to factor by trial division.
fn leading_divisors(f: &UnivariatePolynomial) -> Vec<u64> {
    let lcm = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let Some(lead) = ints.last().and_then(|c| (c / &content).abs().to_u64()) else { return Vec::new() };
    if lead == 0 || lead > 1 << 40 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= lead {
        if lead % d == 0 {
            small.push(d);
            if d * d != lead {
                large.push(lead / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// A rational root `k/q` of `f` inside `root`'s interval, with `q` among `denominators`.
fn snap_rational(root: &IsolatedRealRoot, denominators: &[u64]) -> Option<Rational> {
    for &q in denominators {
        let q = Rational::from_integer(BigInt::from(q));
        let r = refine_root(root, &(Rational::one() / &q));
        if r.is_exact() {
            return Some(r.lo);
        }
        let k = (&r.lo * &q).ceil();
        for cand in [&k / &q, (&k + Rational::one()) / &q] {
            // Intervals are half-open on the left.
            if r.lo < cand && cand <= r.hi && r.factor.sign_at(&cand) == 0 {
                return Some(cand);
            }
        }
    }
    None
}

/// `f` with the exactly located rational roots divided out, made monic.
fn reduced_factor(f: &UnivariatePolynomial, roots: &[IsolatedRealRoot]) -> UnivariatePolynomial {
    roots
        .iter()
        .filter_map(IsolatedRealRoot::exact_value)
        .fold(f.clone(), |acc, r| acc.div_rem(&UnivariatePolynomial::linear_root(r.clone())).0)
        .monic()
}

/// Splits every square-free factor into its exactly located rational roots
/// and the remaining factor, which keeps all other real roots and the
/// complex part. Each returned root refers to one of the returned factors.
pub fn split_square_free(
    g: &UnivariatePolynomial,
) -> Result<(Vec<(UnivariatePolynomial, u32)>, Vec<IsolatedRealRoot>)> {
    let mut parts = Vec::new();
    let mut all_roots = Vec::new();
    for (f, m) in square_free_decompose(g)? {
        let mut roots = Vec::new();
        isolate_square_free(&f, m, &mut roots);
        for r in roots.iter().filter(|r| r.is_exact()) {
            parts.push((r.factor.clone(), m));
        }
        let reduced = reduced_factor(&f, &roots);
        if reduced.degree().unwrap_or(0) > 0 {
            parts.push((reduced, m));
        }
        all_roots.extend(roots);
    }
    all_roots.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok((parts, all_roots))
}

/// One entry per distinct real root, carrying its multiplicity in `g`.
pub fn isolate_real_roots(g: &UnivariatePolynomial) -> Result<Vec<IsolatedRealRoot>> {
    let mut out = Vec::new();
    for (f, m) in square_free_decompose(g)? {
        isolate_square_free(&f, m, &mut out);
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

/// Exact bisection until the interval is no wider than `width`.
pub fn refine_root(root: &IsolatedRealRoot, width: &Rational) -> IsolatedRealRoot {
    let mut r = root.clone();
    if r.is_exact() || !width.is_positive() {
        return r;
    }
    let f = r.factor.clone();
    let lo_sign = f.sign_at(&r.lo);
    while r.width() > *width {
        let mid = (&r.lo + &r.hi) / rational::int(2);
        let s = f.sign_at(&mid);
        if s == 0 {
            r.lo = mid.clone();
            r.hi = mid.clone();
            r.factor = UnivariatePolynomial::linear_root(mid);
            return r;
        }
        if s == lo_sign {
            r.lo = mid;
        } else {
            r.hi = mid;
        }
    }
    r
}

/// Product `Π factor^mult`, for reconstruction checks.
pub fn expand_factors(factors: &[(UnivariatePolynomial, u32)]) -> UnivariatePolynomial {
    factors.iter().fold(UnivariatePolynomial::one(), |acc, (f, m)| acc.mul(&f.pow(*m)))
}

/// True when `f` has no zero in `[-B, B]` for its Cauchy bound `B`, hence no real zero.
pub fn certify_no_real_roots(f: &UnivariatePolynomial) -> bool {
    if f.is_zero() {
        return false;
    }
    if f.degree() == Some(0) {
        return true;
    }
    SturmSequence::new(f).count_all() == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::vec;
    use proptest::prelude::*;

    fn up(c: &[i64]) -> UnivariatePolynomial {
        UnivariatePolynomial::from_i64(c)
    }

    #[test]
    fn square_free_examples() {
        // (t-1)^2 (t+2) = t^3 - 3t + 2
        let sf = square_free_decompose(&up(&[2, -3, 0, 1])).unwrap();
        assert_eq!(sf, vec![(up(&[2, 1]), 1), (up(&[-1, 1]), 2)]);
        let sf = square_free_decompose(&up(&[1, 0, 1])).unwrap();
        assert_eq!(sf, vec![(up(&[1, 0, 1]), 1)]);
        let cube = up(&[-2, 0, 1]).pow(3);
        assert_eq!(square_free_decompose(&cube).unwrap(), vec![(up(&[-2, 0, 1]), 3)]);
        assert!(square_free_decompose(&UnivariatePolynomial::zero()).is_err());
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_count(&up(&[-2, 0, 1]), &int(0), &int(2)).unwrap(), 1);
        assert_eq!(sturm_count(&up(&[1, 0, 1]), &int(-10), &int(10)).unwrap(), 0);
        assert_eq!(sturm_count(&up(&[0, -1, 0, 1]), &int(-2), &int(2)).unwrap(), 3);
        assert_eq!(sturm_count(&up(&[0, -1, 0, 1]), &int(0), &int(2)), Err(Error::EndpointIsRoot));
    }

    #[test]
    fn isolation_examples() {
        let roots = isolate_real_roots(&up(&[-2, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        let refined: Vec<_> = roots.iter().map(|r| refine_root(r, &rat(1, 2))).collect();
        assert!(refined[0].lo >= int(-2) && refined[0].hi <= int(-1));
        assert!(refined[1].lo >= int(1) && refined[1].hi <= int(2));
        assert!(roots.iter().all(|r| r.multiplicity == 1));

        let roots = isolate_real_roots(&up(&[1, -2, 1])).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].contains(&int(1)));
        assert_eq!(roots[0].multiplicity, 2);

        assert!(isolate_real_roots(&up(&[1, 0, 1])).unwrap().is_empty());
    }

    #[test]
    fn refinement_examples() {
        let root = isolate_real_roots(&up(&[-2, 0, 1])).unwrap().pop().unwrap();
        let fine = refine_root(&root, &rat(1, 1024));
        assert!(fine.width() <= rat(1, 1024));
        assert!(rational::to_f64(&fine.lo) <= core::f64::consts::SQRT_2);
        assert!(rational::to_f64(&fine.hi) >= core::f64::consts::SQRT_2);

        let exact = isolate_real_roots(&up(&[-3, 2])).unwrap().pop().unwrap();
        assert!(exact.is_exact());
        assert_eq!(exact.lo, rat(3, 2));

        let a = refine_root(&root, &rat(1, 8));
        let b = refine_root(&a, &rat(1, 64));
        assert!(a.lo <= b.lo && b.hi <= a.hi && b.width() <= rat(1, 64));
    }

    #[test]
    fn midpoint_hits_rational_root() {
        // t (t - 1/2)(t + 5): bisection of [-B, B] lands on 0 first.
        let p = up(&[0, 1]).mul(&UnivariatePolynomial::linear_root(rat(1, 2))).mul(&up(&[5, 1]));
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, want) in roots.iter().zip([int(-5), int(0), rat(1, 2)]) {
            let fine = refine_root(r, &rat(1, 1 << 20));
            assert!(fine.contains(&want));
        }
    }

    #[test]
    fn rational_roots_off_the_bisection_grid_are_exact() {
        // (t + 2)(t - 3)(3t - 1)(t² + t + 1)
        let p = up(&[2, 1]).mul(&up(&[-3, 1])).mul(&up(&[-1, 3])).mul(&up(&[1, 1, 1]));
        let (parts, roots) = split_square_free(&p).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(IsolatedRealRoot::is_exact));
        let values: Vec<Rational> = roots.iter().map(|r| r.lo.clone()).collect();
        assert_eq!(values, vec![int(-2), rat(1, 3), int(3)]);
        assert!(parts.iter().any(|(f, m)| *f == up(&[1, 1, 1]) && *m == 1));
    }

    fn poly_from_roots(roots: &[(i64, i64)], extra_quadratic: Option<(i64, i64)>) -> UnivariatePolynomial {
        let mut p = UnivariatePolynomial::one();
        for &(num, den) in roots {
            p = p.mul(&UnivariatePolynomial::linear_root(rat(num, den)));
        }
        if let Some((b, c)) = extra_quadratic {
            p = p.mul(&up(&[b * b + c.abs() + 1, 2 * b, 1]));
        }
        p
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn yun_reconstructs(roots in proptest::collection::vec((-6i64..6, 1i64..4), 1..6)) {
            let p = poly_from_roots(&roots, None).scale(&rat(7, 3));
            let sf = square_free_decompose(&p).unwrap();
            prop_assert_eq!(expand_factors(&sf).scale(&p.leading()), p.clone());
            for (i, (f, _)) in sf.iter().enumerate() {
                prop_assert_eq!(f.gcd(&f.derivative()).degree(), Some(0));
                for (g, _) in sf.iter().skip(i + 1) {
                    prop_assert_eq!(f.gcd(g).degree(), Some(0));
                }
            }
        }

        #[test]
        fn root_count_matches_grid_sign_changes(
            coeffs in proptest::collection::vec(-9i64..=9, 2..=9),
        ) {
            let p = up(&coeffs);
            prop_assume!(p.degree().unwrap_or(0) >= 1);
            let f = square_free_decompose(&p).unwrap().into_iter()
                .fold(UnivariatePolynomial::one(), |acc, (f, _)| acc.mul(&f));
            let roots = isolate_real_roots(&f).unwrap();
            // Independent oracle: sign changes of f on a fine rational grid over
            // the Cauchy interval, plus grid points that are exact roots.
            let bound = f.root_bound();
            let steps = 4096i64;
            let mut changes = 0usize;
            let mut prev: Option<i8> = None;
            for k in 0..=steps {
                let t = -bound.clone() + bound.clone() * rat(2 * k, steps);
                let s = f.sign_at(&t);
                if s == 0 {
                    changes += 1;
                    prev = None;
                    continue;
                }
                if let Some(ps) = prev {
                    if ps != s { changes += 1; }
                }
                prev = Some(s);
            }
            // The grid may merge close roots, never invent them; with
            // well-separated roots the two counts agree.
            prop_assert!(changes <= roots.len());
            let step = rational::to_f64(&bound) * 2.0 / steps as f64;
            let values: Vec<f64> = roots.iter().map(IsolatedRealRoot::to_f64).collect();
            if values.windows(2).all(|w| w[1] - w[0] > 3.0 * step) {
                prop_assert_eq!(changes, roots.len());
            }
            prop_assert_eq!(roots.len(), SturmSequence::new(&f).count_all());
            for w in roots.windows(2) {
                prop_assert!(w[0].hi < w[1].lo || (w[0].hi <= w[1].lo && !(w[0].is_exact() && w[1].is_exact() && w[0].lo == w[1].lo)));
            }
        }

        #[test]
        fn separated_roots_are_all_found(
            roots in proptest::collection::btree_set(-20i64..20, 1..7),
            quad in proptest::option::of((-3i64..3, 0i64..3)),
        ) {
            let pairs: Vec<(i64, i64)> = roots.iter().map(|&r| (2 * r + 1, 2)).collect();
            let p = poly_from_roots(&pairs, quad);
            let found = isolate_real_roots(&p).unwrap();
            prop_assert_eq!(found.len(), pairs.len());
            for (r, &(num, den)) in found.iter().zip(pairs.iter()) {
                let fine = refine_root(r, &rat(1, 1 << 16));
                prop_assert!(fine.contains(&rat(num, den)));
            }
        }
    }
}
