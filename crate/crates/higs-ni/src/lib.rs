//! Analysis and simulation toolkit for hybrid integrator-gain systems (HIGS)
//! in positive feedback with negative-imaginary (NI) linear plants.
//!
//! The crate is `no_std` (with `alloc`) and purely computational. File
//! formats, JSON schemas and the command-line front end live in the
//! companion crate `higs-ni-cli`.
//!
//! Modules:
//! - [`matrix`], [`eigen`], [`lti`]: small dense linear algebra and LTI
//!   state-space queries (frequency response, DC gain, minimality).
//! - [`ni`]: negative-imaginary verification, both the frequency-domain
//!   definition and certificate synthesis of a matrix `Y` with
//!   `A Y + Y A' <= 0` and `B + A Y C' = 0`.
//! - [`higs`]: the sector-constrained hybrid integrator-gain element and its
//!   open-loop stepping with event-located mode switches.
//! - [`df`]: describing-function analysis of the HIGS and quasi-linear
//!   closed-loop response prediction.
//! - [`sim`]: event-driven simulation of the positive-feedback
//!   interconnection with runtime storage-function and sector monitors.
//! - [`stability`]: the closed-loop stability certificate (DC loop-gain
//!   bound, Schur margin, shift-identity check) and gain sweeps.

#![cfg_attr(not(test), no_std)]
// index loops are the clearer notation for the dense kernels in here
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod df;
pub mod eigen;
pub mod error;
pub mod higs;
pub mod lti;
pub mod matrix;
pub mod ni;
pub mod sim;
pub mod stability;
pub mod tol;

pub use error::{Error, Result};
