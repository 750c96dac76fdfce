//! Desk-scale simulator for bandits under sparse network interference.
//!
//! The numerics live in `netband-core`; this crate adds what needs `std`:
//! parallel repetitions, CSV and JSON files, SVG plots and the `netband`
//! command line.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod model_file;
pub mod plot;
pub mod records;
pub mod runner;
pub mod transform_check;

pub use netband_core as core;
