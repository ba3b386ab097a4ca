//! Beam alignment for far-field holographic metasurface transceivers.
//!
//! The crate models the separable sinc-product channel of a rectangular
//! metasurface aperture, discretizes the two phase-shift parameters onto
//! grids that keep the mean received signal strength unimodal per axis,
//! and identifies the best grid pair within a fixed pilot budget using a
//! batched elimination bandit. An experiment harness reproduces error-
//! probability and throughput sweeps with seeded Monte Carlo trials, and
//! an analytic module evaluates the matching error-probability bound.
//!
//! Modules:
//! - [`channel`]: gain, mean RSS, noisy RSS sampling, achievable rate
//! - [`grid`]: phase-shift grids, discrete optimum, quantization loss
//! - [`bandit`]: the elimination policy and baseline policies
//! - [`bounds`]: error-probability bound and chi-squared tail machinery
//! - [`config`] / [`harness`]: sweep configuration, runner, CSV output
//!
//! Monte Carlo trials run data-parallel under the `parallel` feature
//! (enabled by default); disabling it falls back to the identical
//! sequential path.

pub mod bandit;
pub mod bounds;
pub mod channel;
pub mod config;
pub mod error;
pub mod grid;
pub mod harness;

pub use error::{Error, Result};
