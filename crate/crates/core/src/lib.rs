//! Synchronous full-information computation over a known dynamic network.
//!
//! A dynamic graph is collapsed to its information-flow graph, which fixes
//! each process's view and hence the protocol complex. From there the crate
//! computes domination numbers, reduced homology over GF(2), shellability
//! checks, and exact solvability of colorless-style agreement tasks by
//! constraint search over decision maps.

pub mod dynet;
pub mod error;
pub mod harness;
pub mod homology;
pub mod protocol;
pub mod simplicial;
pub mod solver;
pub mod tasks;

pub use error::{Error, Result};
