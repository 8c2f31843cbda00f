//! Error type shared by the whole crate.

use thiserror::Error;

use crate::newton::SolveReport;

/// Errors produced by grid construction, quadrature, linear algebra and the
/// nonlinear solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was called with parameters outside its
    /// documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation point lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Newton iteration exhausted its budget. The best iterate seen and
    /// the solve report are carried for diagnostics.
    #[error("Newton iteration did not converge: residual {:.3e} after {} iterations", report.final_residual, report.iterations)]
    NonConvergence {
        report: SolveReport,
        best: Box<Vec<f64>>,
    },

    /// A pivot fell below the singularity threshold during an LU solve.
    #[error("singular matrix: pivot {pivot:.3e} at elimination step {step}")]
    SingularJacobian { step: usize, pivot: f64 },

    /// The eigensolver failed to converge or the decomposition does not
    /// reproduce the matrix to the required accuracy.
    #[error("eigendecomposition failure: {0}")]
    DecompositionFailure(String),

    /// A matrix that must be real up to roundoff carries a too-large
    /// imaginary part.
    #[error("imaginary residue {residue:.3e} exceeds {threshold:.3e} relative")]
    ResidueError { residue: f64, threshold: f64 },

    /// Adaptive oracle quadrature could not reach its accuracy target.
    #[error("quadrature accuracy not reached: error estimate {estimate:.3e} exceeds target {target:.3e}")]
    AccuracyNotReached { estimate: f64, target: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
