//! Normal form of the mixed Hessian
//! `S''_xy = c x^γ y^β Π (y − α_j x)^{m_j} Π Q_j(x, y)`,
//! the resulting case split, and the damping factor each case calls for.
//!
//! Roots `α_j` of the dehomogenized Hessian `g(t) = S''_xy(1, t) / (x^γ y^β)`
//! correspond to linear factors `y − α_j x`; a monic quadratic `t² + bt + c`
//! without real roots corresponds to the positive definite form
//! `y² + bxy + cx²`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use crate::bivariate::{Axis, BivariatePolynomial};
use crate::error::{Error, Result};
use crate::exponents::damping_exponent;
use crate::phase::HomogeneousPhase;
use crate::rational::{self, Rational};
use crate::roots::{self, IsolatedRealRoot, SturmSequence};
use crate::univariate::UnivariatePolynomial;

/// Monic `t² + bt + c` with `b² − 4c < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFactor {
    pub b: Rational,
    pub c: Rational,
    pub multiplicity: u32,
}

impl QuadraticFactor {
    pub fn discriminant(&self) -> Rational {
        &self.b * &self.b - rational::int(4) * &self.c
    }

    pub fn as_univariate(&self) -> UnivariatePolynomial {
        UnivariatePolynomial::new(alloc::vec![self.c.clone(), self.b.clone(), Rational::one()])
    }

    /// `y² + bxy + cx²`.
    pub fn as_form(&self) -> BivariatePolynomial {
        BivariatePolynomial::from_terms([
            ((0, 2), Rational::one()),
            ((1, 1), self.b.clone()),
            ((2, 0), self.c.clone()),
        ])
    }
}

/// Part of a square-free factor of `g` that carries no real root.
///
/// `factor` is a rational polynomial with exactly `real_roots` distinct real
/// roots (checked by a Sturm count over the whole line); those roots appear in
/// the linear list, and the remaining `degree` roots are non-real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoRealRootFactor {
    pub factor: UnivariatePolynomial,
    pub multiplicity: u32,
    pub real_roots: usize,
    pub degree: usize,
}

impl NoRealRootFactor {
    pub fn verify(&self) -> bool {
        let total = self.factor.degree().unwrap_or(0);
        SturmSequence::new(&self.factor).count_all() == self.real_roots
            && total == self.real_roots + self.degree
            && self.degree % 2 == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HessianFactorization {
    pub degree: u32,
    pub leading_c: Rational,
    pub gamma: u32,
    pub beta: u32,
    pub linear: Vec<IsolatedRealRoot>,
    pub quadratics: Vec<QuadraticFactor>,
    /// Non-real parts that are not rational quadratics.
    pub certified: Vec<NoRealRootFactor>,
    /// Monic pairwise coprime factors with multiplicities; `c · Π f^m = g`.
    pub parts: Vec<(UnivariatePolynomial, u32)>,
}

impl HessianFactorization {
    /// `Σ m_j` over linear factors.
    pub fn linear_degree(&self) -> u32 {
        self.linear.iter().map(|r| r.multiplicity).sum()
    }

    /// Degree carried by the non-real factors.
    pub fn complex_degree(&self) -> u32 {
        let q: u32 = self.quadratics.iter().map(|q| 2 * q.multiplicity).sum();
        let c: u32 = self.certified.iter().map(|c| c.degree as u32 * c.multiplicity).sum();
        q + c
    }

    /// Number of non-real factors in the normal form (quadratic or certified).
    pub fn s(&self) -> usize {
        self.quadratics.len() + self.certified.len()
    }

    pub fn degree_bookkeeping_holds(&self) -> bool {
        self.gamma + self.beta + self.linear_degree() + self.complex_degree() + 2 == self.degree
    }

    /// `c · Π f^m` as a polynomial in `t`.
    pub fn dehomogenized(&self) -> UnivariatePolynomial {
        roots::expand_factors(&self.parts).scale(&self.leading_c)
    }

    /// `x^γ y^β · x^d g(y / x)`, which must equal `S''_xy`.
    pub fn reconstruct(&self) -> BivariatePolynomial {
        let g = self.dehomogenized();
        let d = g.degree().unwrap_or(0) as u32;
        BivariatePolynomial::from_terms(
            g.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| ((self.gamma + d - k as u32, self.beta + k as u32), c.clone())),
        )
    }

    /// Every root, quadratic and certified part is accounted for by `parts`,
    /// with consistent multiplicities and no real roots hidden in non-real parts.
    pub fn components_consistent(&self) -> bool {
        for (f, m) in &self.parts {
            let real: Vec<_> = self.linear.iter().filter(|r| &r.factor == f).collect();
            if real.iter().any(|r| r.multiplicity != *m) {
                return false;
            }
            let deg = f.degree().unwrap_or(0);
            let complex = deg - real.len();
            if complex == 0 {
                continue;
            }
            let as_quadratic = deg == 2
                && real.is_empty()
                && self.quadratics.iter().any(|q| &q.as_univariate() == f && q.multiplicity == *m);
            let as_certified = self
                .certified
                .iter()
                .any(|c| &c.factor == f && c.multiplicity == *m && c.degree == complex && c.verify());
            if !(as_quadratic || as_certified) {
                return false;
            }
        }
        self.quadratics.iter().all(|q| q.discriminant().is_negative())
    }

    /// Linear factor `y − α x` for each root, in increasing `α`.
    pub fn alphas_f64(&self) -> Vec<f64> {
        self.linear.iter().map(IsolatedRealRoot::to_f64).collect()
    }
}

pub fn factor_hessian(phase: &HomogeneousPhase) -> Result<HessianFactorization> {
    let n = phase.degree();
    if n < 3 {
        return Err(Error::ZeroHessian);
    }
    let h = phase.mixed_hessian();
    if h.is_zero() {
        return Err(Error::ZeroHessian);
    }
    let (gamma, beta, g) = h.dehomogenize(Axis::X)?;
    let leading_c = g.leading();
    let (parts, linear) = roots::split_square_free(&g)?;
    let mut quadratics = Vec::new();
    let mut certified = Vec::new();
    for (f, m) in &parts {
        let deg = f.degree().unwrap_or(0);
        let real = linear.iter().filter(|r| &r.factor == f).count();
        if deg == real {
            continue;
        }
        if deg == 2 && real == 0 {
            quadratics.push(QuadraticFactor { b: f.coeff(1), c: f.coeff(0), multiplicity: *m });
        } else {
            certified.push(NoRealRootFactor { factor: f.clone(), multiplicity: *m, real_roots: real, degree: deg - real });
        }
    }
    Ok(HessianFactorization { degree: n, leading_c, gamma, beta, linear, quadratics, certified, parts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseCase {
    GeneralCase,
    SingleLineWithAxis,
    PureTranslationLine,
    MonomialHessian,
}

impl PhaseCase {
    pub fn name(self) -> &'static str {
        match self {
            PhaseCase::GeneralCase => "GeneralCase",
            PhaseCase::SingleLineWithAxis => "SingleLineWithAxis",
            PhaseCase::PureTranslationLine => "PureTranslationLine",
            PhaseCase::MonomialHessian => "MonomialHessian",
        }
    }
}

pub fn classify_phase(fact: &HessianFactorization, n: u32) -> PhaseCase {
    if fact.linear.is_empty() && fact.s() == 0 {
        return PhaseCase::MonomialHessian;
    }
    if fact.gamma == 0 && fact.s() == 0 && fact.linear.len() == 1 {
        let m = fact.linear[0].multiplicity;
        if fact.beta == 0 && m + 2 == n {
            return PhaseCase::PureTranslationLine;
        }
        if fact.beta > 0 && fact.beta + 2 < n && fact.beta + m + 2 == n {
            return PhaseCase::SingleLineWithAxis;
        }
    }
    PhaseCase::GeneralCase
}

/// The weight `D` whose power `|D|^z` damps the operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DampingFactor {
    /// An exact polynomial `D(x, y)`.
    Polynomial(BivariatePolynomial),
    /// `|λ|^{-1/n} + |x − y/α|`, vanishing-free translate of the line `y = αx`.
    Pedestal { alpha: IsolatedRealRoot, n: u32 },
}

impl DampingFactor {
    /// `|D(x, y)|` at frequency `λ`.
    pub fn abs_value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        match self {
            DampingFactor::Polynomial(p) => libm::fabs(p.eval_f64(x, y)),
            DampingFactor::Pedestal { alpha, n } => {
                let a = alpha.to_f64();
                libm::pow(libm::fabs(lambda), -1.0 / *n as f64) + libm::fabs(x - y / a)
            }
        }
    }

    pub fn description(&self) -> String {
        match self {
            DampingFactor::Polynomial(p) => format!("{p}"),
            DampingFactor::Pedestal { alpha, n } => match alpha.exact_value() {
                Some(a) if a.is_one() => format!("|lambda|^(-1/{n}) + |x - y|"),
                Some(a) => format!("|lambda|^(-1/{n}) + |x - y/({a})|"),
                None => format!("|lambda|^(-1/{n}) + |x - y/alpha|, alpha root of {}", alpha.factor),
            },
        }
    }

    /// Power of `|λ|` needed for the pedestal, if any.
    pub fn has_pedestal(&self) -> bool {
        matches!(self, DampingFactor::Pedestal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DampingSpec {
    pub case: PhaseCase,
    pub factor: DampingFactor,
    pub re_z: Rational,
    pub decay_exponent: Rational,
    pub beta: u32,
}

/// `x^γ Π (y − α_j x)^{m_j} Π Q_j`, i.e. `S''_xy / (c y^β)`, computed exactly.
fn standard_damping(fact: &HessianFactorization) -> BivariatePolynomial {
    let h = fact.reconstruct();
    let inv_c = Rational::one() / &fact.leading_c;
    BivariatePolynomial::from_terms(h.terms().map(|(&(i, j), c)| ((i, j - fact.beta), c * &inv_c)))
}

pub fn damping_spec(fact: &HessianFactorization, case: PhaseCase, n: u32) -> Result<DampingSpec> {
    let beta = fact.beta;
    match case {
        PhaseCase::PureTranslationLine => {
            let alpha = fact.linear[0].clone();
            let decay = Rational::one() / rational::int(2 * (beta as i64 + 1));
            Ok(DampingSpec {
                case,
                factor: DampingFactor::Pedestal { alpha, n },
                re_z: rational::rat(n as i64 - 2, 2),
                decay_exponent: decay,
                beta,
            })
        }
        PhaseCase::SingleLineWithAxis => {
            let e = damping_exponent(n, beta)?;
            let alpha = fact.linear[0]
                .exact_value()
                .cloned()
                .expect("a lone linear square-free factor has a rational root");
            let x = BivariatePolynomial::monomial(Rational::one(), 1, 0);
            let line = BivariatePolynomial::from_terms([((0, 1), Rational::one()), ((1, 0), -alpha)]);
            let d = x.mul(&line.pow(n - 3 - beta));
            Ok(DampingSpec {
                case,
                factor: DampingFactor::Polynomial(d),
                re_z: e.a_beta,
                decay_exponent: e.decay,
                beta,
            })
        }
        PhaseCase::GeneralCase | PhaseCase::MonomialHessian => {
            let e = damping_exponent(n, beta)?;
            Ok(DampingSpec {
                case,
                factor: DampingFactor::Polynomial(standard_damping(fact)),
                re_z: e.a_beta,
                decay_exponent: e.decay,
                beta,
            })
        }
    }
}

/// Convenience: factor, classify and pick the damping in one go.
pub fn analyze_damping(phase: &HomogeneousPhase) -> Result<(HessianFactorization, PhaseCase, DampingSpec)> {
    if phase.is_degenerate() {
        return Err(Error::DegeneratePhase);
    }
    let fact = factor_hessian(phase)?;
    let case = classify_phase(&fact, phase.degree());
    let spec = damping_spec(&fact, case, phase.degree())?;
    Ok((fact, case, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn phase(text: &str) -> HomogeneousPhase {
        HomogeneousPhase::parse(text).unwrap()
    }

    fn poly(text: &str) -> BivariatePolynomial {
        BivariatePolynomial::parse(text).unwrap()
    }

    #[test]
    fn factor_examples() {
        let f = factor_hessian(&phase("x^2*y^2")).unwrap();
        assert_eq!((f.leading_c.clone(), f.gamma, f.beta), (int(4), 1, 1));
        assert!(f.linear.is_empty() && f.quadratics.is_empty() && f.certified.is_empty());

        let f = factor_hessian(&phase("x^3*y + x*y^3")).unwrap();
        assert_eq!((f.leading_c.clone(), f.gamma, f.beta), (int(3), 0, 0));
        assert_eq!(f.quadratics, alloc::vec![QuadraticFactor { b: int(0), c: int(1), multiplicity: 1 }]);

        let f = factor_hessian(&phase("x^3 - 3*x^2*y + 3*x*y^2 - y^3")).unwrap();
        assert_eq!((f.leading_c.clone(), f.gamma, f.beta), (int(6), 0, 0));
        assert_eq!(f.linear.len(), 1);
        assert_eq!(f.linear[0].exact_value(), Some(&int(1)));
        assert_eq!(f.linear[0].multiplicity, 1);

        assert_eq!(factor_hessian(&phase("x*y")), Err(Error::ZeroHessian));
        assert_eq!(factor_hessian(&phase("x^5 + y^5")), Err(Error::ZeroHessian));
    }

    #[test]
    fn irreducible_quartic_is_certified() {
        // S''_xy = (x^4 + y^4) up to scale needs S with that Hessian:
        // S = x^5 y/5 + x y^5/5 has S''_xy = x^4 + y^4.
        let f = factor_hessian(&phase("1/5*x^5*y + 1/5*x*y^5")).unwrap();
        assert!(f.linear.is_empty() && f.quadratics.is_empty());
        assert_eq!(f.certified.len(), 1);
        assert_eq!(f.certified[0].degree, 4);
        assert!(f.components_consistent());
        assert_eq!(classify_phase(&f, 6), PhaseCase::GeneralCase);
    }

    #[test]
    fn mixed_factor_keeps_complex_part() {
        // g(t) = (t^2 - 2)(t^2 + 1) = t^4 - t^2 - 2; S''_xy = y^4 - x^2 y^2 - 2x^4.
        let s = phase("-2/5*x^5*y - 1/9*x^3*y^3 + 1/5*x*y^5");
        let f = factor_hessian(&s).unwrap();
        assert_eq!(f.reconstruct(), s.mixed_hessian());
        assert_eq!(f.linear.len(), 2);
        assert_eq!(f.certified.len(), 1);
        assert_eq!(f.certified[0].real_roots, 2);
        assert_eq!(f.certified[0].degree, 2);
        assert!(f.components_consistent());
        assert!(f.degree_bookkeeping_holds());
        let a = f.alphas_f64();
        assert!((a[0] + core::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((a[1] - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        let cube = phase("x^3 - 3*x^2*y + 3*x*y^2 - y^3");
        assert_eq!(classify_phase(&factor_hessian(&cube).unwrap(), 3), PhaseCase::PureTranslationLine);
        let mono = phase("x^3*y^2");
        assert_eq!(classify_phase(&factor_hessian(&mono).unwrap(), 5), PhaseCase::MonomialHessian);
        let general = phase("x^3*y + x*y^3");
        assert_eq!(classify_phase(&factor_hessian(&general).unwrap(), 4), PhaseCase::GeneralCase);
    }

    /// A phase whose mixed Hessian is `y (y − x)^2 = y^3 − 2xy^2 + x^2y`.
    fn single_line_phase() -> HomogeneousPhase {
        // ∂x∂y (x^{5-k} y^k) = (5-k) k x^{4-k} y^{k-1}
        // want coefficient of x^2 y: k=2 → 6 a_2 = 1; x y^2: k=3 → 6 a_3 = -2; y^3: k=4 → 4 a_4 = 1.
        HomogeneousPhase::new(alloc::vec![int(0), int(0), rat(1, 6), rat(-1, 3), rat(1, 4), int(0)]).unwrap()
    }

    #[test]
    fn damping_examples() {
        let (_, case, spec) = analyze_damping(&phase("x^3*y + x*y^3")).unwrap();
        assert_eq!(case, PhaseCase::GeneralCase);
        assert_eq!(spec.factor, DampingFactor::Polynomial(poly("x^2 + y^2")));
        assert_eq!(spec.re_z, rat(1, 2));
        assert_eq!(spec.decay_exponent, rat(1, 2));

        let s = single_line_phase();
        assert_eq!(s.mixed_hessian(), poly("y^3 - 2*x*y^2 + x^2*y"));
        let (f, case, spec) = analyze_damping(&s).unwrap();
        assert_eq!((f.gamma, f.beta), (0, 1));
        assert_eq!(case, PhaseCase::SingleLineWithAxis);
        assert_eq!(spec.factor, DampingFactor::Polynomial(poly("x*y - x^2")));
        assert_eq!(spec.re_z, damping_exponent(5, 1).unwrap().a_beta);

        let (_, case, spec) = analyze_damping(&phase("x^3 - 3*x^2*y + 3*x*y^2 - y^3")).unwrap();
        assert_eq!(case, PhaseCase::PureTranslationLine);
        assert_eq!(spec.re_z, rat(1, 2));
        assert_eq!(spec.factor.description(), "|lambda|^(-1/3) + |x - y|");
        let v = spec.factor.abs_value(0.25, 0.25, 8.0);
        assert!((v - 0.5).abs() < 1e-15);

        // β = n − 2: S''_xy = c y^{n-2}.
        assert_eq!(analyze_damping(&phase("x*y^3")).unwrap_err(), Error::UndefinedExponent);
    }

    pub(crate) fn arb_nondegenerate(lo: u32, hi: u32) -> impl Strategy<Value = HomogeneousPhase> {
        (lo..=hi)
            .prop_flat_map(|n| proptest::collection::vec((-4i64..=4, 1i64..=3), (n + 1) as usize))
            .prop_filter_map("non-degenerate", |cs| {
                let s = HomogeneousPhase::new(cs.into_iter().map(|(a, b)| rat(a, b)).collect()).ok()?;
                (!s.is_degenerate()).then_some(s)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reconstruction_and_bookkeeping(s in arb_nondegenerate(3, 9)) {
            let f = factor_hessian(&s).unwrap();
            prop_assert_eq!(f.reconstruct(), s.mixed_hessian());
            prop_assert!(f.degree_bookkeeping_holds());
            prop_assert!(f.components_consistent());
            for q in &f.quadratics {
                prop_assert!(q.discriminant().is_negative());
            }
            let (k_min, k_max) = s.k_extremes().unwrap();
            prop_assert_eq!(f.gamma, s.degree() - k_max - 1);
            prop_assert_eq!(f.beta, k_min - 1);
            for w in f.linear.windows(2) {
                prop_assert!(w[0].hi <= w[1].lo && w[0].lo < w[1].hi);
            }
        }
    }
}
