//! Floating-scalar abstraction for the archimedean routines.

/// The scalar bound used throughout the archimedean crate.
///
/// A thin alias over `num_traits::Float` plus the conversions the quadrature
/// routines need; implemented for `f32` and `f64`. Algorithms are written once
/// against this trait, and the crate exports f64-typed convenience wrappers.
pub trait Real:
    num_traits::Float + num_traits::FloatConst + num_traits::NumAssign + std::fmt::Debug + 'static
{
    /// Converts a small integer index into the scalar type.
    fn of_usize(n: usize) -> Self;
    /// Converts an f64 constant into the scalar type.
    fn of_f64(x: f64) -> Self;
    /// Converts the scalar into f64 (for reporting).
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    fn of_usize(n: usize) -> Self {
        n as f32
    }
    fn of_f64(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn of_usize(n: usize) -> Self {
        n as f64
    }
    fn of_f64(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
}
