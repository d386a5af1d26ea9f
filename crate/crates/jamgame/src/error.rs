//! Error types shared across the solver and simulator.

use crate::allocation::AllocationProfile;

/// Errors produced by the numeric core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was evaluated at a point where it is unbounded.
    #[error("singularity: {0}")]
    Singularity(String),

    /// A root finder or Newton iteration exhausted its iteration budget.
    #[error("root finder did not converge: {context} (residual {residual:.3e} after {iterations} iterations)")]
    RootFinding {
        context: String,
        residual: f64,
        iterations: usize,
    },

    /// The Gauss-Seidel best-response iteration did not reach a fixed point.
    #[error(
        "Nash iteration did not converge after {sweeps} sweeps \
         (last profile change {last_change:.3e}, previous {prev_change:.3e})"
    )]
    NashNonConvergence {
        sweeps: usize,
        /// Profile change over the final sweep.
        last_change: f64,
        /// Profile change over the sweep before it; close values suggest oscillation.
        prev_change: f64,
        /// The profile at the point the iteration was abandoned.
        last_profile: Box<AllocationProfile>,
    },

    /// A per-step allocation solve failed inside a trajectory sweep.
    #[error("allocation solve failed at trajectory step {step}: {source}")]
    SweepStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
