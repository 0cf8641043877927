//! Lattice spin geometry on conformally flat 4-tori.
//!
//! The crate is `no_std` with `alloc`. It covers the Clifford algebra of
//! Euclidean 4-space, a periodic lattice with metric `e^{2u} δ`, U(1) link
//! connections, spinor operators, the Seiberg-Witten energy with its exact
//! gradient and Hessian, and lowest-eigenvalue solvers.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clifford;
pub mod error;
pub mod functional;
pub mod gauge;
pub mod lattice;
pub mod linalg;
pub mod spectral;
pub mod spin;
pub mod stability;

mod real;
#[cfg(test)]
pub(crate) mod testutil;

pub use num_complex::Complex64;

pub use error::{Error, Result};
