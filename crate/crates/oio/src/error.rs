use std::io;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] oio_core::Error),
    #[error(transparent)]
    Parse(#[from] oio_core::ParseError),
    #[error("resolution too coarse: spacing {spacing:.3e} exceeds {limit:.3e} on the {axis} axis")]
    ResolutionTooCoarse { axis: &'static str, spacing: f64, limit: f64 },
    #[error("memory budget: {rows}x{cols} kernel exceeds cap {cap}x{cap}")]
    MemoryBudget { rows: usize, cols: usize, cap: usize },
    #[error("lambda 2^{exp} is above the cap 2^{cap}")]
    LambdaCap { exp: i32, cap: i32 },
    #[error("damping factor vanishes on the cutoff support while Re z = {re_z} < 0")]
    SingularDamping { re_z: f64 },
    #[error("no convergence after {iterations} iterations (last value {value}, residual {residual:.3e})")]
    NoConvergence { iterations: usize, value: f64, residual: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Process exit code: 2 for input errors, 4 for budget failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(oio_core::Error::BudgetExceeded { .. })
            | LabError::MemoryBudget { .. }
            | LabError::ResolutionTooCoarse { .. }
            | LabError::LambdaCap { .. } => 4,
            LabError::Core(_) | LabError::Parse(_) | LabError::Invalid(_) | LabError::Config { .. } | LabError::SingularDamping { .. } => 2,
            LabError::NoConvergence { .. } | LabError::Io(_) | LabError::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
