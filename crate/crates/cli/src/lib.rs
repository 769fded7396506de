//! Command-line companion to `patcov-core`: text formats for graphs,
//! vertex sets, and tree decompositions; deterministic instance
//! generators; and the statistical report type used by the `estimate`
//! subcommand.
//!
//! Everything here is deterministic given its inputs: parsers and
//! writers round-trip, and all randomness flows through the seeded
//! [`patcov_core::rng::Sampler`].

pub mod gen;
pub mod io;
pub mod stats;
