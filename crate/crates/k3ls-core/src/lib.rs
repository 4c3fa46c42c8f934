//! Linear systems through fat points on generic K3 surfaces.
//!
//! The crate is split in three layers:
//!
//! * exact integer calculus on the Picard lattice of the blown-up surface
//!   ([`numerics`]) together with the conjectural speciality classification
//!   ([`classifier`]);
//! * the central-fiber degeneration recursion that reduces homogeneous
//!   systems to single-point leaves and emits auditable certificates
//!   ([`degeneration`]);
//! * an exact finite-field interpolation oracle on concrete K3 models that
//!   measures actual dimensions by ranks of jet-condition matrices
//!   ([`oracle`], with supporting arithmetic in [`fp`], [`series`],
//!   [`poly`], [`matrix`] and [`model`]).
//!
//! The core is `no_std` (with `alloc`); IO, the CLI and the on-disk formats
//! live in the companion `k3ls` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classifier;
pub mod degeneration;
pub mod error;
pub mod fp;
pub mod matrix;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod poly;
pub mod rng;
pub mod series;

pub use error::Error;
pub use numerics::{DimensionPair, SystemClass};
