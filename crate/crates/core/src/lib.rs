//! Finite-size key rates for Gaussian-modulated CVQKD, the optical channel
//! models that feed them, link capacities over satellite passes, and
//! bottleneck routing of secret keys through a dynamic node graph.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, scenario
//! parsing and the command-line driver live in the `cvqkd-sim` crate.
//!
//! Module map:
//!
//! * [`skr`] covariance matrix, mutual information, Holevo bound, empirical
//!   reconciliation curves and the finite-size key rate.
//! * [`channels`] transmittance of fibre, underwater, inter-satellite and
//!   satellite-ground links, with a per-source loss budget for the latter.
//! * [`passes`] elevation histograms, link capacities, relay feasibility and
//!   inter-satellite chain planning.
//! * [`netgraph`] link classification, capacity snapshots and widest-path
//!   routing.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channels;
mod error;
pub mod math;
pub mod netgraph;
pub mod passes;
pub mod skr;

pub use error::{Error, Result};

/// Mean Earth radius used by every geometric construction, in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;
