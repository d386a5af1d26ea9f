//! Solver and simulator for the two-team jamming power-allocation
//! differential game.
//!
//! Two teams of two mobile agents each split their instantaneous power
//! between talking to their team-mate and jamming the opposing pair. The
//! crate computes pure-strategy Nash equilibria of the per-instant allocation
//! game, certifies their existence from the physical parameters, and
//! integrates the team trajectories under saddle-point heading controls over
//! the fixed energy-limited horizon.

// Validation guards are written as `!(v > 0.0)` so that NaN is rejected
// along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod channel;
pub mod error;
pub mod game;
pub mod modulation;
pub mod scenario;

pub use error::{Error, Result};
