//! Performance model of hybrid OMA-NOMA data aggregation for massive
//! machine-type communication.
//!
//! Machine-type devices (MTDs) report to an aggregator over `N` orthogonal
//! channels, at most two per channel, with successive interference
//! cancellation separating co-channel devices. The aggregator then relays
//! everything it decoded to the base station on a single channel.
//!
//! The crate has two independent halves that are meant to be checked
//! against each other:
//!
//! * closed forms: [`rrs`] (random scheduling), [`crs`] (channel-dependent
//!   scheduling), [`relay`] and [`searchspace`], built on [`numerics`] and
//!   the outside-interference law in [`interference`];
//! * an event-level Monte Carlo simulator in [`sim`].
//!
//! [`optimizer`] searches the power split, and [`validation`] runs the
//! analytic-vs-simulation checks end to end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature nodes are kept at their published precision
#![allow(clippy::excessive_precision)]

pub mod config;
pub mod crs;
pub mod error;
pub mod interference;
pub mod numerics;
pub mod optimizer;
mod parallel;
pub mod pmf;
pub mod relay;
pub mod rrs;
pub mod searchspace;
pub mod sim;
pub mod validation;

pub use config::{PowerSplit, SystemConfig};
pub use error::{Error, Result};
pub use interference::InterferenceField;
pub use numerics::QuadratureSpec;
pub use pmf::Pmf;

/// Scheduling scheme evaluated by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Random resource scheduling.
    Rrs,
    /// Channel-dependent (rank-ordered) resource scheduling.
    Crs,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Rrs => f.write_str("rrs"),
            Scheme::Crs => f.write_str("crs"),
        }
    }
}
