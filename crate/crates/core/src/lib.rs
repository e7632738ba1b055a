//! Best-response dynamics in lottery (Tullock) contests.
//!
//! - [`contest`]: utilities, best responses, equilibria and the
//!   approximate-equilibrium gap.
//! - [`dynamics`]: selection policies, trajectories, warm-up and cycle detection.
//! - [`potential`]: the best-response potential and convergence quantities.
//! - [`walk`]: the biased random walk with a wall and coupon-collector coverage.
//! - [`experiment`]: parameter sweeps, CSV and plot output, cycle search.
//! - [`verify`]: the invariant suites behind the `verify` command.

pub mod contest;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod potential;
pub mod rng;
pub mod verify;
pub mod walk;

pub use contest::{ActionProfile, ContestConfig};
pub use error::{Error, Result};
