//! Robustness monitoring for Metric Temporal Logic over sampled traces, and
//! mining of falsification domains for parametric specifications.
//!
//! The crate is organised bottom-up:
//!
//! - [`mtl`]: formula syntax, the text parser, timed state sequences and two
//!   independent robustness evaluators.
//! - [`pmtl`]: parameter spaces, instantiation and syntactic monotonicity.
//! - [`sysmodel`]: deterministic simulators producing timed state sequences.
//! - [`optimize`]: penalty costs and a seedable simulated annealing search.
//! - [`mining`]: single-shot parameter mining, RGDA and SDA.

pub mod mining;
pub mod mtl;
pub mod optimize;
pub mod pmtl;
pub mod sysmodel;
