//! Entropy-weighted, fuzzy-evidential multi-criteria evaluation.
//!
//! The pipeline has three stages:
//!
//! 1. the indicator catalog ([`catalog`]);
//! 2. expert pairwise matrices aggregated and gated for consistency
//!    ([`ahp`]), then Shannon-entropy criterion weights ([`entropy`]);
//! 3. expert scores fuzzified into grade memberships and mass functions
//!    ([`fuzzy`]), fused with Dempster's and Murphy's rules ([`evidence`]).
//!
//! [`pipeline`] wires the stages together; [`report`] and [`chart`] render
//! the results.

pub mod ahp;
pub mod bpa;
pub mod catalog;
pub mod chart;
pub mod entropy;
pub mod evidence;
pub mod fixtures;
pub mod frame;
pub mod fuzzy;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod selftest;

pub use bpa::{validate_bpa, Bpa, BpaError};
pub use catalog::{Indicator, IndicatorId};
pub use frame::{cardinality, intersect, Frame, Label, Subset};
