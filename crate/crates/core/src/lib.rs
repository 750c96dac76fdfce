//! Multi-armed bandits under sparse network interference.
//!
//! Each of `N` units receives one of `A` treatments per round, and a unit's
//! mean reward depends only on the treatments of its (at most `s`) neighbors.
//! Encoding a joint treatment as a point of the Boolean hypercube
//! `{-1,+1}^{N log2 A}` turns every unit reward into a sparse linear function
//! of Fourier characters, which the explore-then-commit and elimination
//! policies in [`policies`] exploit.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, threads, or the command line lives in the `netband` crate.
#![no_std]
#![forbid(unsafe_code)]
// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod environment;
mod error;
pub mod fourier;
pub mod harness;
pub mod policies;
pub mod regression;
pub mod seed;

pub use error::{Error, Result};

/// Largest table of action profiles any exhaustive routine will touch.
pub const DEFAULT_PROFILE_CAP: u64 = 1 << 24;

/// Largest index set whose subsets will be enumerated.
pub const DEFAULT_SUBSET_BITS_CAP: usize = 24;
