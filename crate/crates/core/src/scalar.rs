//! Scalar abstraction shared by every geometric and algebraic routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the crate computes in: `f32` or `f64`.
///
/// Tolerances that the algorithms need are exposed here so that generic code
/// picks values appropriate for the precision instead of hard-coding `f64`
/// constants.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute geometric tolerance for on-curve and membership predicates.
    const GEOM_TOL: f64;
    /// Relative threshold used for numerical rank decisions.
    const RANK_RTOL: f64;

    /// Converts an `f64` literal. Every finite `f64` is representable up to
    /// rounding in both supported types, so this never fails for finite input.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    /// Lossy conversion to `f64`, used for reporting and random sampling.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn geom_tol() -> Self {
        Self::lit(Self::GEOM_TOL)
    }

    fn rank_rtol() -> Self {
        Self::lit(Self::RANK_RTOL)
    }

    /// Threshold below which a residual of magnitude `scale` is rounding noise.
    fn noise(scale: Self) -> Self {
        Self::epsilon() * Self::lit(1024.0) * (Self::one() + scale.abs())
    }
}

impl Scalar for f64 {
    const GEOM_TOL: f64 = 1e-9;
    const RANK_RTOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const GEOM_TOL: f64 = 1e-4;
    const RANK_RTOL: f64 = 1e-5;
}
