//! Archimedean side of the sup-norm machinery.
//!
//! Everything here is generic over the floating scalar via [`Real`], with f64
//! aliases for the common case: modified Bessel functions K_{it} of imaginary
//! order, the transition-region size envelope, and the archimedean test kernel
//! with its spherical-transform positivity checks.

#![warn(missing_docs)]

pub mod bessel;
pub mod envelope;
pub mod kernel;
pub mod scalar;

pub use scalar::Real;
