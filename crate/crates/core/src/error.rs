use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),

    #[error("speed profile not admissible: {0}")]
    Admissibility(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),

    #[error("power iteration did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("solution blew up at t = {time}: norm {norm:.3e} exceeds guard")]
    BlowUp { time: f64, norm: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_)
            | LabError::Admissibility(_)
            | LabError::Json(_)
            | LabError::UnsupportedSymbol(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
