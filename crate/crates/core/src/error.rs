//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the numerical kernels and regime evaluators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point was evaluated with the wrong asymptotic-regime formula.
    #[error("regime error: {0}")]
    Regime(String),

    /// Adaptive quadrature ran out of subdivisions. Carries the best
    /// estimate so callers can decide whether it is still usable.
    #[error("quadrature failed to converge: best estimate {best:e}, error bound {error:e} after {subdivisions} subdivisions")]
    QuadratureConvergence {
        best: f64,
        error: f64,
        subdivisions: usize,
    },

    /// Newton/continuation solver failure, with a short trace summary.
    #[error("solver failed to converge: {0}")]
    SolverConvergence(String),

    /// Two branch points have (nearly) merged; the requested quantity is
    /// owned by the critical-edge formulas instead.
    #[error("confluent degeneracy: {0}")]
    Degenerate(String),

    /// Evaluation on a branch cut without a side flag.
    #[error("branch-cut ambiguity: {0}")]
    CutAmbiguity(String),

    /// Two internally redundant evaluation routes disagree.
    #[error("internal consistency violation: {0}")]
    Inconsistency(String),

    /// Finite differencing too coarse to trust the result.
    #[error("resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
