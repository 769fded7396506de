//! Randomized sampling of low-treewidth vertex sets that cover small connected
//! patterns in planar-like graphs, plus the machinery it is built from:
//!
//! - [`graph`]: undirected graphs with ghost vertices (zero traversal cost),
//!   ghost-aware distances, torso, contractions.
//! - [`cluster`]: randomized ball carving into low-radius components.
//! - [`duality`]: min-cost flow on a vertex-split network returning either a
//!   cheap path family or a chain of disjoint minimal separators.
//! - [`decomp`]: tree decompositions — validation, balanced separators from a
//!   centroid bag walk, elimination-order heuristics, outerplanarity layers.
//! - [`cover`]: the recursive sampler producing a vertex set `A` together with
//!   a tree decomposition of `G[A]` and a full trace of its random draws.
//! - [`solve`]: exact k-path / k-cycle solvers (dynamic programming over nice
//!   tree decompositions, brute force, repetition driver).
//!
//! Everything is deterministic given a seed: collections are ordered, floats
//! go through `libm`, and randomness comes from ChaCha8 only.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cluster;
pub mod cover;
pub mod decomp;
pub mod duality;
pub mod graph;
pub mod rng;
pub mod solve;
