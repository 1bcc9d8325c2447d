//! Numerical core for Aharonov-Bohm interference studies and path-dimension
//! estimation: special functions, free/flux propagators, winding-number
//! topology, interference reconstruction and lattice Monte Carlo.
//!
//! The crate is `no_std` (alloc required) so the numerical kernels can be
//! embedded anywhere; file formats, CSV output and the CLI live in the
//! companion `pathdim-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod exp1;
pub mod exp2;
pub mod hausdorff;
pub mod pimc;
pub mod propagator;
pub mod rng;
pub mod specfun;
pub mod windings;

mod quad;

/// Complex amplitude carried by every propagator.
pub type Complex = num_complex::Complex<f64>;

pub use num_rational::BigRational;
