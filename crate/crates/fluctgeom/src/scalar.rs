//! Scalar abstraction: the whole library is generic over the working
//! floating-point type.

use nalgebra as na;
use num_traits as nt;

/// Floating-point scalar the library is generic over.
///
/// `f32` and `f64` implement this. Tolerances quoted in the rest of the
/// crate are stated for `f64` and rescaled by the machine-epsilon ratio
/// for narrower types (see [`spec_tol`]).
pub trait Scalar: Copy + Default + nt::FromPrimitive + na::RealField {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn from_f64<T: Scalar>(x: f64) -> T {
    na::convert(x)
}

/// Widen a scalar to `f64` (exact for `f32` and `f64`).
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    na::try_convert(x).expect("scalar is representable as f64")
}

/// A tolerance stated for `f64`, rescaled to the working type by the
/// ratio of machine epsilons. For `T = f64` this returns `tol_f64`
/// unchanged.
#[inline]
pub fn spec_tol<T: Scalar>(tol_f64: f64) -> T {
    let ratio = to_f64(T::default_epsilon()) / f64::EPSILON;
    from_f64(tol_f64 * ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_tol_is_identity_for_f64() {
        assert_eq!(spec_tol::<f64>(1e-10), 1e-10);
        assert_eq!(spec_tol::<f64>(1e-12), 1e-12);
    }

    #[test]
    fn spec_tol_loosens_for_f32() {
        let t: f32 = spec_tol(1e-10);
        assert!(t > 1e-10f32);
    }

    #[test]
    fn f64_roundtrip() {
        let x = 0.123456789_f64;
        assert_eq!(to_f64(from_f64::<f64>(x)), x);
        let y: f32 = from_f64(0.5);
        assert_eq!(to_f64(y), 0.5);
    }
}
