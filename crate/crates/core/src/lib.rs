// SPDX-License-Identifier: Apache-2.0

//! Exact computations with subgroups of free groups through Stallings core
//! graphs: folding, the poset of quotients, free-factor and
//! algebraic-extension tests, primitivity rank, and the expected number of
//! common fixed points of random permutation representations as exact
//! rational functions of `n`, with Monte Carlo estimators to check them.

pub mod core_graph;
pub mod error;
pub mod expectation;
pub mod montecarlo;
pub mod poly;
pub mod poset;
pub mod words;

pub use core_graph::{morphism, CoreGraph, Edge, GraphMorphism, Partition, PreGraph};
pub use error::{Error, Result};
pub use words::{Letter, Word};
