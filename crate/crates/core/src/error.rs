//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was handed an input that violates its
    /// preconditions (non-positive scale constant, odd sample count, ...).
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// Constraint projection ran out of iterations. Carries the residuals
    /// at the point the iteration stopped.
    #[error("constraint projection did not converge after {iterations} iterations \
             (unit-norm residual {unit_residual:.3e}, mean residual {mean_residual:.3e})")]
    ProjectionDiverged {
        iterations: usize,
        unit_residual: f64,
        mean_residual: f64,
    },

    /// A sample collapsed to (numerically) zero length where a unit vector
    /// was required.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A time step produced samples with norms far from 1, signalling gross
    /// instability of the run.
    #[error("integration step failed: {0}")]
    StepFailed(String),

    /// The implicit solve inside a step stopped contracting.
    #[error("fixed-point iteration did not converge after {iterations} iterations \
             (last contraction factor {contraction:.3e})")]
    FixedPointDiverged { iterations: usize, contraction: f64 },

    /// The direction n_f = f/|f| is undefined because |f| is numerically zero.
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    /// A line-integral oracle was asked to run on a curve that does not close.
    #[error("oracle inapplicable: {0}")]
    OracleInapplicable(String),

    /// A phase point violates the collinearity constraint and therefore does
    /// not represent any filament.
    #[error("point not in the admissible phase space: {0}")]
    NotInOmega(String),

    /// Geometry query on a curve with a vanishing tangent.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
