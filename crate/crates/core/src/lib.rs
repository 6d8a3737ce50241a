//! Exact combinatorial machinery for semistable reduction of morphisms of
//! rational conical polyhedral complexes in relative dimension at most three.
//!
//! Everything here is exact: coordinates are arbitrary-precision rationals,
//! lattices are rational basis matrices, and there are no tolerances anywhere.
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion `semistable-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod alteration;
pub mod complex;
pub mod digest;
pub mod error;
pub mod fiber;
pub mod geometry;
pub mod goodfn;
pub mod lattice;
pub mod linalg;
pub mod morphism;
pub mod rat;
pub mod sample;
pub mod subdivide;

pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeIndex};
pub use rat::{Rat, QVec};
