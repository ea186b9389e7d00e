//! Downlink coverage, association and rate of a Sub-6GHz macro tier
//! overlaid with clustered mmWave small cells.
//!
//! The crate has two independent evaluators of the same model: a Monte
//! Carlo engine ([`montecarlo`]) and numerical integration of the
//! stochastic-geometry expressions ([`analytic`]). Both consume
//! [`SystemParams`] in SI units (watts, meters, hertz, linear gains).

pub mod analytic;
pub mod association;
pub mod channel;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod special;
pub mod units;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use association::{AssociationOutcome, Tier};
pub use params::{ScenarioKind, SystemParams};
