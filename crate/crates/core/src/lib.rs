//! Staged quantum-circuit compilation with per-stage fidelity attribution.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and wall-clock budgets live in the `hbr-cli` crate.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod benchmarks;
pub mod circuit;
pub mod compiler;
pub mod costing;
pub mod linalg;
pub mod noise;
pub mod sim;
