//! Envy-free makespan scheduling on unrelated machines.
//!
//! A cost matrix gives the processing cost of every job on every machine
//! (possibly infinite). The library computes schedules that are *locally
//! efficient*, i.e. no cyclic exchange of the machines' bundles lowers the
//! total cost; exactly these schedules can be paired with machine payments
//! so that no machine prefers another machine's bundle-plus-payment over
//! its own. Everything is exact rational arithmetic, no floats on any
//! solver path.
//!
//! The pieces:
//!
//! * [`cost`], [`instance`]: rationals-with-infinity, cost matrices,
//!   integral and fractional assignments, load vectors, bundles.
//! * [`matching`]: exact min-cost bipartite matching with a deterministic
//!   lexicographic tie-break; reassigning bundles optimally.
//! * [`envy`]: local-efficiency certificates, payment computation via
//!   difference constraints, envy-freeness verification.
//! * [`indivisible`]: the phased rebalancing algorithm that turns any
//!   starting bundle structure into a locally efficient schedule with a
//!   logarithmic makespan overhead, plus brute-force oracles.
//! * [`linprog`]: a small exact-rational simplex solver.
//! * [`divisible`]: fractional schedules; lexicographic minimization of
//!   the sorted load vector yields local efficiency, and there are
//!   constructive repair tools for the underlying exchange argument.
//! * [`lowerbound`]: a structured instance family on which every locally
//!   efficient schedule has makespan far above the optimum, with the
//!   counting argument that certifies the gap for astronomically large
//!   sizes.
//! * [`docs`], [`generate`], [`cli`]: JSON file formats, seeded instance
//!   generators, and the command-line front end.
//!
//! The `examples/` directory has one runnable walk-through per capability;
//! start with `cargo run --example find_approx`.

// Much of the crate walks 2-D rational matrices where two rows of the
// same buffer interact; plain index loops are the honest shape for that.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cost;
pub mod divisible;
pub mod docs;
pub mod envy;
pub mod error;
pub mod generate;
pub mod indivisible;
pub mod instance;
pub mod linprog;
pub mod lowerbound;
pub mod matching;

pub use cost::Cost;
pub use error::Error;
pub use instance::{
    AssignmentRef, BundleSet, FractionalAssignment, Instance, IntegralAssignment, LoadVector,
};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
