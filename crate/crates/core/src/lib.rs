//! Fractional Fourier and Zak transforms on the unit lattice, the oblique
//! Zak marginal at rational cotangent angles, and the phase-retrieval
//! non-uniqueness constructions built on it.

// `!(x > 0.0)` is how NaN is rejected alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod approx;
pub mod chirp;
pub mod counterexample;
pub mod error;
pub mod frft;
pub mod numerics;
pub mod oblique;
pub mod selftest;
pub mod torus;
pub mod zak;

pub use error::{Error, Result};
pub use numerics::*;
