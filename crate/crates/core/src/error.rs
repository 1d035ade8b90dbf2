use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Output of a run that can stop early: whatever was computed before the
/// failure, plus the failure itself.
#[derive(Debug)]
pub struct Partial<T> {
    pub value: T,
    pub error: Option<Error>,
}

impl<T> Partial<T> {
    pub fn complete(value: T) -> Self {
        Self { value, error: None }
    }

    pub fn into_result(self) -> Result<T> {
        match self.error {
            None => Ok(self.value),
            Some(e) => Err(e),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not an se(2) element: fixed-zero entry of magnitude {magnitude:e}")]
    MalformedAlgebra { magnitude: f64 },

    #[error("unsupported retraction tangent approximation: {0}")]
    UnsupportedOrder(String),

    #[error("constraint matrix is rank deficient (|det(mu M^-1 mu^T)| = {det:e})")]
    SingularConstraint { det: f64 },

    #[error("initial state violates the constraints (residual {residual:e})")]
    InadmissibleInitialState { residual: f64 },

    #[error("node momentum formulas disagree by {discrepancy:e}")]
    InconsistentStates { discrepancy: f64 },

    #[error("Newton solve failed after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("closed-form denominator is near zero ({value:e})")]
    NearSingularDenominator { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }

    /// Strips step context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for configuration and parse failures (as opposed to numerical ones).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::Parse { .. }
                | Error::Validation(_)
                | Error::InvalidParameter(_)
                | Error::InadmissibleInitialState { .. }
                | Error::UnsupportedOrder(_)
                | Error::DimensionMismatch(_)
        )
    }
}
