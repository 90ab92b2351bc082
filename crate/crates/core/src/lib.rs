//! Simulation and analysis of one- and two-photon temporal interference of
//! down-converted photon pairs in a Mach-Zehnder interferometer, with and
//! without a spatial flip in one arm.
//!
//! The closed-form engine in [`interferometer`] is cross-checked by the
//! mode-expansion oracle in [`oracle`], which propagates the state through the
//! optical elements one at a time.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod interferometer;
pub mod io;
pub mod oracle;
pub mod spatial;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
