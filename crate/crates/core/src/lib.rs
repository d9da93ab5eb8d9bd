//! Low-complexity space-frequency scheduling for the OFDMA MIMO broadcast
//! downlink.
//!
//! The pipeline for one slot is
//!
//! ```text
//! channel -> beams -> equivalent gains -> feedback -> spatial schedule
//!         -> waterfilling -> dual price update
//! ```
//!
//! * [`channel`] draws fading realizations, random orthonormal beams and the
//!   per-beam power gains `c[k, m, q] = |h[k, m]^T b[m, q]|^2`.
//! * [`scheduling`] picks, per subcarrier, how many beams to switch on, which
//!   beam combination to use and which user to serve on each beam.
//! * [`allocation`] waterfills power over the scheduled links and adapts the
//!   power price `lambda` and rate prices `mu` by a stochastic subgradient step.
//! * [`simulation`] wires the stages together, runs baselines and sweeps, and
//!   writes plot-ready outputs.

// NaN must fail validation, so `!(x > 0.0)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod channel;
mod error;
pub mod rng;
pub mod scheduling;
pub mod simulation;

pub use error::{Error, Result};
