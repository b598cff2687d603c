//! Scalar abstraction for the dense complex numerics.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type the linear algebra and channel code is generic over.
///
/// Tolerances are part of the scalar because a 1e-12 structural check is
/// meaningless in single precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Tolerance for structural checks (Hermitian, unitary, trace-preserving).
    fn structural_tol() -> Self;
    /// Tolerance for quantities accumulated over many products.
    fn evolution_tol() -> Self;
    /// Probability below which a measurement outcome is treated as impossible.
    fn impossible_prob() -> Self;
    /// Negative probabilities above `-clip_tol()` are rounding noise and clipped to zero.
    fn clip_tol() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f64 {
    fn structural_tol() -> Self {
        1e-12
    }
    fn evolution_tol() -> Self {
        1e-10
    }
    fn impossible_prob() -> Self {
        1e-15
    }
    fn clip_tol() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn structural_tol() -> Self {
        1e-5
    }
    fn evolution_tol() -> Self {
        1e-4
    }
    fn impossible_prob() -> Self {
        1e-7
    }
    fn clip_tol() -> Self {
        1e-6
    }
}
