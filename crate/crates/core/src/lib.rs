//! Exact local building blocks for sup-norm bounds on newforms of powerful level.
//!
//! The crate computes, over Q_p with exact arithmetic:
//! cyclotomic/√q value rings, coset positions for K₁(p^n), unit-group and
//! additive characters with Gauss sums and GL(1) ε-factors, a catalog of the
//! local representations that occur at powerful level, their Whittaker
//! functions on the a(ϖ^t)wn(ϖ^{−l}v) cells, matrix coefficients and the
//! projector normalization δ_π, and the symbolic exponent bookkeeping that
//! assembles local data into the global hybrid bound.

#![warn(missing_docs)]

pub mod abelian;
pub mod assembly;
pub mod chars;
pub mod cyclo;
pub mod exponents;
pub mod groupenum;
pub mod matrixcoeff;
pub mod padic;
pub mod quadext;
pub mod report;
pub mod reps;
pub mod value;
pub mod whittaker;
