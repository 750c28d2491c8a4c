//! A small numeric trait so the float and interval evaluations of every
//! series formula share one implementation.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::interval::{iv_pi, Interval};

pub trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    /// The float taken at face value.
    fn from_f64(x: f64) -> Self;
    /// A model constant written in decimal (0.01, 1.5, ...).
    fn constant(x: f64) -> Self;
    fn half(self) -> Self;
    fn pi() -> Self;
    fn try_recip(self) -> Option<Self>;
}

impl Scalar for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn constant(x: f64) -> Self {
        x
    }
    #[inline]
    fn half(self) -> Self {
        0.5 * self
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn try_recip(self) -> Option<Self> {
        (self != 0.0).then(|| 1.0 / self)
    }
}

impl Scalar for Interval {
    #[inline]
    fn zero() -> Self {
        Interval::ZERO
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        Interval::point(x)
    }
    #[inline]
    fn constant(x: f64) -> Self {
        Interval::from_decimal(x)
    }
    #[inline]
    fn half(self) -> Self {
        Interval::half(self)
    }
    #[inline]
    fn pi() -> Self {
        iv_pi()
    }
    fn try_recip(self) -> Option<Self> {
        self.recip().ok()
    }
}

/// `(πn)²` in the scalar's arithmetic.
#[inline]
pub fn pi_n_sq<T: Scalar>(n: usize) -> T {
    let p = T::pi() * T::from_f64(n as f64);
    p * p
}
