//! Monte Carlo laboratory for Brownian particles whose drifts depend on their
//! ranks.
//!
//! The crate is organised bottom-up:
//!
//! * [`types`] — drift vectors, spacing samples, market-weight sequences and
//!   the two sequence-space metrics.
//! * [`stationary`] — exact sampling of the product-exponential stationary
//!   spacing law and the induced market weights.
//! * [`sde`] — Euler–Maruyama simulation of the rank-dependent SDE.
//! * [`pd`] — Poisson–Dirichlet samplers (Poisson point process,
//!   stick-breaking, normalized exponentiated order statistics).
//! * [`asymptotics`] — limit formulas for the largest weight, `D_p` and the
//!   market entropy.
//! * [`verification`] — the statistical harness and named scenarios.
//!
//! Rank 1 is always the *largest* particle.

// `!(x > 0.0)` is used on purpose throughout: it rejects NaN along with
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod pd;
pub mod quadrature;
pub mod sde;
pub mod special;
pub mod stationary;
pub mod stats;
pub mod streams;
pub mod types;
pub mod verification;

pub use error::{Error, Result};
pub use streams::{Execution, Streams};
pub use types::{DriftSpec, PointSequence, SpacingSample, WeightSequence};
