//! Scalar abstraction for the real field underlying all amplitudes.

use core::fmt::{Debug, Display};
use core::iter::Sum;
use core::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type the whole crate is generic over: `f32` or `f64`.
///
/// Besides the usual float operations this carries the centralized
/// comparison tolerances. Every tolerance in the crate comes from here;
/// there are no ad-hoc magic epsilons at call sites.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Tolerance for construction invariants (norm, Hermiticity, unit trace).
    fn tol_construct() -> Self;

    /// Tolerance for derived equalities (two computation routes of the same
    /// quantity, positivity slack of eigenvalues).
    fn tol_derived() -> Self;

    /// Tolerance for root finding and probability-sum checks.
    fn tol_root() -> Self;

    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 must convert to a Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Scalar must convert to f64")
    }
}

impl Scalar for f64 {
    fn tol_construct() -> Self {
        1e-12
    }
    fn tol_derived() -> Self {
        1e-10
    }
    fn tol_root() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn tol_construct() -> Self {
        1e-5
    }
    fn tol_derived() -> Self {
        1e-4
    }
    fn tol_root() -> Self {
        1e-3
    }
}
