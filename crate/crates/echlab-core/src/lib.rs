//! Computational core for ECH/PFH-style experiments in low-dimensional
//! symplectic dynamics.
//!
//! - [`rotation`]: rotation numbers, Conley–Zehnder indices, partition conditions.
//! - [`orbit`]: orbit sets, the J₀ index, scores and U-tower audits.
//! - [`ellipsoid`]: exact Reeb flow on ellipsoid boundaries, action spectra, Weyl tables.
//! - [`twist`]: monotone disk twists, Calabi invariant, the lattice-path PFH complex
//!   and its spectral invariants.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ellipsoid;
pub mod gf2;
pub mod orbit;
pub mod quad;
pub mod rotation;
pub mod twist;

pub use rotation::{Partition, Rational, Rotation};
