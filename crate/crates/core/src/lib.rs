//! Outage analysis of k-th best device selection in wireless powered
//! communication networks with a saturating (non-linear) rectenna.
//!
//! Three independent routes to the same numbers:
//!
//! * [`analytic`]: exact finite-M expressions for random, SNR-, energy-,
//!   uplink- and max-min-based selection, plus their high-SNR floors and
//!   two-device (pair) selection;
//! * [`evt`]: Gumbel-limit approximations for large populations;
//! * [`montecarlo`]: a reproducible simulator applying each ranking rule
//!   to drawn Rayleigh channels.
//!
//! [`experiments`] drives sweeps, figure datasets and comparisons on top.

// `!(v > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod evt;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod special;

pub use analytic::{Method, OutageEstimate, PairScheme, PairSpec, Scheme, SchemeSpec};
pub use error::{Error, Result};
pub use model::{EhModel, RectennaParams, SystemParams};
