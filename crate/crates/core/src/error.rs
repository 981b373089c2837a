use alloc::string::String;

/// Syntax error in a phase expression, with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("degenerate phase: all mixed coefficients a_1..a_(n-1) vanish")]
    DegeneratePhase,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("mixed Hessian vanishes identically or degree below 3")]
    ZeroHessian,
    #[error("polynomial has no mixed monomials")]
    NoMixedTerms,
    #[error("damping exponent undefined for beta = n - 2")]
    UndefinedExponent,
    #[error("outside the hypothesis: {0}")]
    OutOfHypothesis(&'static str),
    #[error("argument out of range: {0}")]
    OutOfRange(&'static str),
    #[error("interval endpoint is a root")]
    EndpointIsRoot,
    #[error("argument must be positive")]
    NonpositiveArgument,
    #[error("quadrature budget exceeded after {evaluations} evaluations")]
    BudgetExceeded { evaluations: u64 },
}

pub type Result<T> = core::result::Result<T, Error>;
