//! Quantitative pipeline of an entangled two-photon-absorption sensitivity
//! experiment: source photon statistics, joint spectral/temporal analysis
//! of photon pairs, beam and fluorescence-collection modeling, classical
//! and entangled cross-section estimation, upper-bound and
//! quantum-advantage computation, and a synthetic-experiment simulator.
//!
//! Everything is a pure function over immutable inputs; all types are safe
//! to share across threads without coordination.

// Validation deliberately uses negated comparisons (`!(v > 0.0)`) so that
// NaN inputs fail the checks instead of slipping through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod jsi;
pub mod optics;
pub mod photon_stats;
mod quad;
pub mod sim;
pub mod spectra;
pub mod stats;
pub mod types;
pub mod units;
pub mod xsection;

pub use error::{Error, Result};
pub use types::{ApparatusSpec, CollectionModel, SampleSpec, UncertainValue};
