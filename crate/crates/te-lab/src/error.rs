//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("root finder did not converge; residual polynomial values {residuals:?}")]
    NoConvergence { residuals: Vec<f64> },
    #[error("eigenvalue {nu} is not simple: gap {gap:e} below threshold {threshold:e}")]
    NearMultiple { nu: crate::C64, gap: f64, threshold: f64 },
    #[error("direction phi={phi} is gamma-degenerate: gamma^2 = 2 kappa_j0 - trace A")]
    GammaDegenerate { phi: f64 },
    #[error("direction phi={phi} is degenerate (kappa1 = kappa2); {hint}")]
    Degenerate { phi: f64, hint: String },
    #[error("branch continuation failed: {0}")]
    Branch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("regime assertion falsified: {0}")]
    Falsified(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::InvalidMedium(_)
            | LabError::InvalidInput(_)
            | LabError::Config(_)
            | LabError::GammaDegenerate { .. }
            | LabError::Degenerate { .. }
            | LabError::Io(_) => 1,
            LabError::NoConvergence { .. }
            | LabError::NearMultiple { .. }
            | LabError::Branch(_)
            | LabError::Numerical(_) => 2,
            LabError::Falsified(_) => 3,
        }
    }

    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::InvalidMedium(_) => "invalid_medium",
            LabError::InvalidInput(_) => "invalid_input",
            LabError::Config(_) => "config",
            LabError::NoConvergence { .. } => "no_convergence",
            LabError::NearMultiple { .. } => "near_multiple",
            LabError::GammaDegenerate { .. } => "gamma_degenerate",
            LabError::Degenerate { .. } => "degenerate",
            LabError::Branch(_) => "branch",
            LabError::Numerical(_) => "numerical",
            LabError::Falsified(_) => "falsified",
            LabError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
