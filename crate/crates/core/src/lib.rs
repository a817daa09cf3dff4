//! Discrete wave turbulence of two-dimensional capillary waves on a flow of
//! constant vorticity.
//!
//! The crate is `no_std` (it needs `alloc`) and covers:
//!
//! - [`dispersion`]: frequencies, resonant vorticities and coupling coefficients,
//! - [`search`]: exact-resonance enumeration and resonance widths,
//! - [`clustering`]: ε-accuracy resonance clusters and their NR-diagrams,
//! - [`dynamics`]: cluster ODE systems, conservation laws and integration,
//! - [`analytic`]: closed-form isolated-triad solutions in Jacobi elliptic functions.
//!
//! File formats, configuration and the command line live in the `capwave-cli`
//! companion crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod clustering;
pub mod dispersion;
pub mod dynamics;
mod error;
pub mod ode;
pub mod search;

pub use error::Error;

pub use num_complex::Complex64;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
