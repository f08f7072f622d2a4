//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of constructors, operators, and solvers.
///
/// Numerical *certificate* failures (a residual exceeding its tolerance after
/// a solve that did converge) are reported through the solver reports rather
/// than through this enum; `Error` covers conditions under which an operation
/// refuses to produce a value at all.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction rejected the requested dimensions.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two fields living on different grids (or with incompatible
    /// degrees/valences) were combined.
    #[error("incompatible operands: {0}")]
    Incompatible(String),

    /// A requested mode lies outside the representable band of the grid.
    #[error("band limit exceeded: {0}")]
    BandExceeded(String),

    /// An input failed a documented precondition (non-closed form,
    /// non-integrable Beltrami field, degenerate Jacobian, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A Beltrami field with sup-norm ≥ 1 was passed to a solver that
    /// requires a contraction.
    #[error("Beltrami field is not a contraction: sup-norm {sup:.6} ≥ 1")]
    NotContractive { sup: f64 },

    /// An iteration reached its cap without meeting its tolerance. The
    /// partially converged state is withheld; the history is kept for
    /// diagnosis.
    #[error("no convergence after {iterations} iterations (last update {last_update:.3e}, tol {tol:.3e})")]
    NonConvergence {
        iterations: usize,
        last_update: f64,
        tol: f64,
    },

    /// A weighted form was passed to an operator expecting a different
    /// canonical-bundle power.
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),

    /// A metric patch failed its positivity margin.
    #[error("metric not positive: margin {margin:.6}")]
    MetricNotPositive { margin: f64 },
}
