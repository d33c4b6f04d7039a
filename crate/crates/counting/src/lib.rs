//! Hyperbolic lattice-point counting, the Hecke amplifier, and the
//! geometric side of the amplified pretrace inequality.
//!
//! * [`lattice`] enumerates integer matrices of fixed determinant moving a
//!   point a small hyperbolic distance, with exact rational membership and a
//!   self-certifying entry box.
//! * [`fundamental`] decides membership in the level-adapted fundamental
//!   region exactly.
//! * [`amplifier`] carries the exact Hecke convolution algebra and builds
//!   amplifier coefficients with a certified detection floor.
//! * [`geometric`] assembles the kernel-weighted amplified lattice sum and
//!   compares it against the counting bound.

#![warn(missing_docs)]

pub mod amplifier;
pub mod fundamental;
pub mod geometric;
pub mod lattice;

pub use amplifier::{build_amplifier, hecke_convolution_expand, AmplifierCoefficients};
pub use fundamental::fundamental_membership;
pub use geometric::{geometric_side, GeometricReport};
pub use lattice::{enumerate_close_lattice, LatticeMatrix, Point};
