//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion from an integer.
    #[inline]
    fn int(x: i64) -> Self {
        Self::from_i64(x).expect("integer representable")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// `max(abs, mult * eps)`, used to keep absolute tolerances attainable in
    /// lower precision.
    #[inline]
    fn tol(abs: f64, mult: f64) -> Self {
        Self::lit(abs).max(Self::epsilon() * Self::lit(mult))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn wrap01<T: Real>(x: T) -> T {
    let r = x - x.floor();
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}

/// Signed representative of `x mod 1` in `[-1/2, 1/2)`.
#[inline]
pub fn wrap_half<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    wrap01(x + half) - half
}

/// Euclidean distance between two points of the unit torus (minimum image).
#[inline]
pub fn torus_distance<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    let dx = wrap_half(a[0] - b[0]);
    let dy = wrap_half(a[1] - b[1]);
    dx.hypot(dy)
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping() {
        assert_eq!(wrap01(1.25f64), 0.25);
        assert_eq!(wrap01(-0.25f64), 0.75);
        assert!((wrap_half(0.9f64) + 0.1).abs() < 1e-15);
        assert!((torus_distance([0.05f64, 0.5], [0.95, 0.5]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(12, -18), 6);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(7, 0), 7);
    }
}
