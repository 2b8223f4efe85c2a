//! Certified upper bounds of the L2 gain of stable continuous-time LTI systems
//! when the exogenous input is restricted to be entrywise nonnegative
//! (the "L2+ induced norm").
//!
//! The plant is augmented with an internally positive Jordan-chain filter whose
//! states are nonnegative whenever the input is. A copositive multiplier acting
//! on those signals enters a bounded-real-type LMI; replacing the copositive
//! cone by the tractable inner approximation `PSD + NN` turns the bound into a
//! semidefinite program. Increasing the filter degree gives a non-increasing
//! sequence of bounds.
//!
//! Module map:
//!
//! - [`linsys`]: state-space kernels (Lyapunov, spectra, positivity, simulation,
//!   H-infinity norm, sampled lower bounds).
//! - [`filterbank`]: the positive filter and the augmented system.
//! - [`cones`]: copositive multipliers and copositivity oracles.
//! - [`sdp`]: primal/dual SDP assembly, conic backend, interior witnesses.
//! - [`bounds`]: bound sweeps, small-gain certificates, feedback simulation.

// BLAS/LAPACK for the conic backend; linked from .cargo/config.toml.
extern crate netlib_src;

pub mod bounds;
pub mod cones;
mod error;
pub mod filterbank;
pub mod fixtures;
pub mod linsys;
pub mod par;
pub mod sdp;

pub use error::{Error, Result};
pub use filterbank::{
    augment, build_positive_filter, AugmentedSystem, PositiveFilter, PositiveFilterSpec,
};
pub use linsys::{Signal, StateSpace};
pub use par::Execution;
