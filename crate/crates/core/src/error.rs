use thiserror::Error;

/// Errors produced by the solvers and their supporting machinery.
#[derive(Debug, Error)]
pub enum SulphError {
    /// A parameter or datum violates its documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A path or field does not live on (a refinement of) the expected grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The porosity 1 + B c left the validated regime.
    #[error("porosity degeneracy: {0}")]
    PorosityDegeneracy(String),

    /// Picard iterate distances stopped decreasing; callers split the
    /// time interval and restart.
    #[error("non-contraction: {0}")]
    NonContraction(String),

    /// An iteration cap was exhausted without meeting its tolerance.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// Scenario file could not be parsed.
    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SulphError>;

impl SulphError {
    /// Process exit code for the CLI: 2 for validation problems, 3 for
    /// solver non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            SulphError::NonContraction(_) | SulphError::NonConvergence(_) => 3,
            _ => 2,
        }
    }
}
