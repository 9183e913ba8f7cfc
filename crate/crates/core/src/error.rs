//! Error type shared by all toolkit operations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two fields (or a field and a background) live on different lattices.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A computation produced a non-finite value where one is not allowed.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The time stepper produced non-finite values.
    #[error("blow-up detected at step {step}: field contains non-finite values")]
    BlowUp { step: usize },

    /// Successive fixed-point differences stopped decreasing.
    #[error(
        "fixed-point iteration is not contracting after {iterations} iterations \
         (last successive-difference ratios {ratios:?}); reduce the time horizon T"
    )]
    NonContraction { iterations: usize, ratios: Vec<f64> },

    /// The fixed-point iteration ran out of its iteration budget.
    #[error(
        "fixed-point iteration did not reach tolerance {tol:e} within {max_iter} iterations \
         (last difference {last_diff:e}); reduce T or relax the tolerance"
    )]
    IterationBudget {
        max_iter: usize,
        tol: f64,
        last_diff: f64,
    },

    /// A refinement study produced errors that do not shrink monotonically.
    #[error("diagnostics error: {0}")]
    Diagnostics(String),

    /// A binary artifact failed structural validation.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
