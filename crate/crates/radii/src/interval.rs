//! Outward-rounded interval arithmetic.
//!
//! Every operation first computes the round-to-nearest result and then moves
//! it by one ulp in the unsafe direction, but only when an error-free
//! transformation (TwoSum, or an FMA residual for products and quotients)
//! shows that the nearest result is not already on the correct side.  The
//! enclosures are therefore the tightest directed roundings for `+`, `-`,
//! `*` and `/`, and exact endpoint arithmetic stays exact.
//!
//! No hardware rounding mode is touched, so the arithmetic is safe to use
//! from any number of threads.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

/// How directed rounding is realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingStrategy {
    /// Round to nearest, then step to the neighbouring float when the exact
    /// residual says the nearest value lies on the wrong side.
    NextFloatAdjust,
    /// Switch the floating-point unit's rounding mode per operation.
    HardwareMode,
}

/// The strategy compiled into this build.
pub const ROUNDING: RoundingStrategy = RoundingStrategy::NextFloatAdjust;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum IntervalError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(Interval),
    #[error("non-positive base {0} in a real power")]
    NonPositiveBase(Interval),
    #[error("overflow: interval bound is not finite")]
    Overflow,
    #[error("invalid interval bounds [{0}, {1}]")]
    InvalidBounds(f64, f64),
    #[error("logarithm of a non-positive interval {0}")]
    NonPositiveLog(Interval),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Below this magnitude residuals of products and quotients may no longer be
/// exact, so results are widened in both directions instead.
const TINY: f64 = 1e-270;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn nonfinite_dn(s: f64) -> f64 {
    if s == f64::INFINITY {
        f64::MAX
    } else {
        f64::NEG_INFINITY
    }
}

#[inline]
fn nonfinite_up(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        f64::MIN
    } else {
        f64::INFINITY
    }
}

#[inline]
pub(crate) fn add_dn(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return nonfinite_dn(s);
    }
    if !e.is_finite() {
        return s.next_down();
    }
    if e < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return nonfinite_up(s);
    }
    if !e.is_finite() {
        return s.next_up();
    }
    if e > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn mul_dn(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return nonfinite_dn(p);
    }
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    let e = a.mul_add(b, -p);
    if e < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return nonfinite_up(p);
    }
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a/b - fl(a/b)`, or `None` when the residual is not trustworthy.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if q.abs() < TINY || a.abs() < TINY {
        return None;
    }
    let r = -(q.mul_add(b, -a));
    Some(if r == 0.0 { 0.0 } else { r.signum() * b.signum() })
}

#[inline]
pub(crate) fn div_dn(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return nonfinite_dn(q);
    }
    if a == 0.0 {
        return 0.0;
    }
    match div_residual_sign(a, b, q) {
        Some(s) if s >= 0.0 => q,
        _ => q.next_down(),
    }
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return nonfinite_up(q);
    }
    if a == 0.0 {
        return 0.0;
    }
    match div_residual_sign(a, b, q) {
        Some(s) if s <= 0.0 => q,
        _ => q.next_up(),
    }
}

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Checked constructor: both bounds finite and `lo <= hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(IntervalError::InvalidBounds(lo, hi));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::Overflow);
        }
        Ok(Interval { lo, hi })
    }

    /// Bounds produced by arithmetic; may be infinite after overflow, which
    /// every predicate treats as a failure.
    #[inline]
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            return Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            };
        }
        Interval { lo, hi }
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        Interval::raw(x, x)
    }

    /// Enclosure of the decimal number the float `x` was written as.  Floats
    /// that are integers are taken as exact; anything else is widened by one
    /// ulp on each side.
    pub fn from_decimal(x: f64) -> Self {
        if x.fract() == 0.0 && x.abs() < 9.0e15 {
            Interval::point(x)
        } else {
            Interval::raw(x.next_down(), x.next_up())
        }
    }

    /// Hull of two floats given in either order.
    pub fn hull_of(a: f64, b: f64) -> Self {
        Interval::raw(a.min(b), a.max(b))
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    /// Upper bound on the width.
    pub fn width(self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    /// Largest absolute value in the interval.
    #[inline]
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval::raw(0.0, self.mag())
        }
    }

    /// `[0, mag]`, the enclosure of `|x|` used when only an upper bound matters.
    #[inline]
    pub fn mag_iv(self) -> Self {
        Interval::raw(0.0, self.mag())
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(self, other: Interval) -> Self {
        Interval::raw(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn intersect(self, other: Interval) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    /// True iff every element is `< 0`.  A `false` only means the check did
    /// not succeed.
    pub fn strictly_negative(self) -> bool {
        self.is_finite() && self.hi < 0.0
    }

    pub fn strictly_positive(self) -> bool {
        self.is_finite() && self.lo > 0.0
    }

    /// Turns an overflowed result into an error.
    pub fn checked(self) -> Result<Self, IntervalError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(IntervalError::Overflow)
        }
    }

    /// Exact multiplication by one half (up to subnormal rounding).
    pub fn half(self) -> Self {
        Interval::raw(mul_dn(self.lo, 0.5), mul_up(self.hi, 0.5))
    }

    pub fn max(self, other: Interval) -> Self {
        Interval::raw(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn min(self, other: Interval) -> Self {
        Interval::raw(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn square(self) -> Self {
        self.pow_int(2)
    }

    /// Quotient; dividing by an interval that contains zero is an error.
    pub fn try_div(self, b: Interval) -> Result<Self, IntervalError> {
        if b.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval(b));
        }
        let (a0, a1) = (self.lo, self.hi);
        let (b0, b1) = (b.lo, b.hi);
        let lo = div_dn(a0, b0)
            .min(div_dn(a0, b1))
            .min(div_dn(a1, b0))
            .min(div_dn(a1, b1));
        let hi = div_up(a0, b0)
            .max(div_up(a0, b1))
            .max(div_up(a1, b0))
            .max(div_up(a1, b1));
        Ok(Interval::raw(lo, hi))
    }

    pub fn recip(self) -> Result<Self, IntervalError> {
        Interval::ONE.try_div(self)
    }

    /// `{x^k : x in self}` with the even-power minimum at zero.
    pub fn pow_int(self, k: u32) -> Self {
        if k == 0 {
            return Interval::ONE;
        }
        let dn = |x: f64| (1..k).fold(x, |acc, _| mul_dn(acc, x));
        let up = |x: f64| (1..k).fold(x, |acc, _| mul_up(acc, x));
        let (lo, hi) = (self.lo, self.hi);
        if lo >= 0.0 {
            Interval::raw(dn(lo), up(hi))
        } else if hi <= 0.0 {
            if k.is_multiple_of(2) {
                Interval::raw(dn(-hi), up(-lo))
            } else {
                Interval::raw(-up(-lo), -dn(-hi))
            }
        } else if k.is_multiple_of(2) {
            Interval::raw(0.0, up(self.mag()))
        } else {
            Interval::raw(-up(-lo), up(hi))
        }
    }

    /// `{x^y : x in self, y in q}` for a positive base.
    pub fn pow_real(self, q: Interval) -> Result<Self, IntervalError> {
        if !(self.lo > 0.0) {
            return Err(IntervalError::NonPositiveBase(self));
        }
        if q.is_point() && q.lo.fract() == 0.0 && (0.0..=64.0).contains(&q.lo) {
            return Ok(self.pow_int(q.lo as u32));
        }
        (q * self.ln()?).exp()
    }

    pub fn exp(self) -> Result<Self, IntervalError> {
        let lo = exp_point(self.lo)?.lo;
        let hi = exp_point(self.hi)?.hi;
        Ok(Interval::raw(lo, hi))
    }

    pub fn ln(self) -> Result<Self, IntervalError> {
        if !(self.lo > 0.0) {
            return Err(IntervalError::NonPositiveLog(self));
        }
        let lo = ln_point(self.lo)?.lo;
        let hi = ln_point(self.hi)?.hi;
        Ok(Interval::raw(lo, hi))
    }

    /// Square root of a non-negative interval.
    pub fn sqrt(self) -> Result<Self, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NonPositiveBase(self));
        }
        let dn = |x: f64| {
            let s = x.sqrt();
            if mul_up(s, s) > x {
                s.next_down()
            } else {
                s
            }
        };
        let up = |x: f64| {
            let s = x.sqrt();
            if mul_dn(s, s) < x {
                s.next_up()
            } else {
                s
            }
        };
        Ok(Interval::raw(dn(self.lo).max(0.0), up(self.hi)))
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, b: Interval) -> Interval {
        Interval::raw(add_dn(self.lo, b.lo), add_up(self.hi, b.hi))
    }
}

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, b: Interval) {
        *self = *self + b;
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, b: Interval) -> Interval {
        Interval::raw(add_dn(self.lo, -b.hi), add_up(self.hi, -b.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, b: Interval) -> Interval {
        let (a0, a1, b0, b1) = (self.lo, self.hi, b.lo, b.hi);
        if a0 >= 0.0 && b0 >= 0.0 {
            return Interval::raw(mul_dn(a0, b0), mul_up(a1, b1));
        }
        if a0 == a1 && b0 == b1 {
            return Interval::raw(mul_dn(a0, b0), mul_up(a0, b0));
        }
        let lo = mul_dn(a0, b0)
            .min(mul_dn(a0, b1))
            .min(mul_dn(a1, b0))
            .min(mul_dn(a1, b1));
        let hi = mul_up(a0, b0)
            .max(mul_up(a0, b1))
            .max(mul_up(a1, b0))
            .max(mul_up(a1, b1));
        Interval::raw(lo, hi)
    }
}

impl Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |acc, x| acc + x)
    }
}

/// Interval arithmetic with explicit errors for division by zero and
/// overflow.
pub fn iv_arith(a: Interval, b: Interval, op: ArithOp) -> Result<Interval, IntervalError> {
    let r = match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
    };
    r.checked()
}

const PI_LO: f64 = std::f64::consts::PI;
const LN2_LO: f64 = std::f64::consts::LN_2;

/// Enclosure of π.
pub fn iv_pi() -> Interval {
    Interval::raw(PI_LO, PI_LO.next_up())
}

/// Enclosure of ln 2.
pub fn iv_ln2() -> Interval {
    Interval::raw(LN2_LO, LN2_LO.next_up())
}

const EXP_TERMS: u32 = 18;
const LN_TERMS: u32 = 12;

fn exp_point(x: f64) -> Result<Interval, IntervalError> {
    if x.is_nan() {
        return Err(IntervalError::Overflow);
    }
    if x == 0.0 {
        return Ok(Interval::ONE);
    }
    if x > 709.0 {
        return Err(IntervalError::Overflow);
    }
    if x < -744.0 {
        return Ok(Interval::raw(0.0, f64::MIN_POSITIVE));
    }
    let k = (x / LN2_LO).round();
    let t = Interval::point(x) - iv_ln2() * Interval::point(k);
    // 1 + t/1 (1 + t/2 (1 + ... (1 + t/N)))
    let mut p = Interval::ONE;
    for j in (1..=EXP_TERMS).rev() {
        p = Interval::ONE + (t * p).try_div(Interval::point(j as f64))?;
    }
    // Lagrange remainder; |t| < 0.35 so e^|t| < 2.
    let tm = t.mag();
    let mut rem = 2.0;
    for j in 1..=(EXP_TERMS + 1) {
        rem = div_up(mul_up(rem, tm), j as f64);
    }
    p += Interval::raw(-rem, rem);
    Ok(p * pow2(k as i32))
}

fn pow2(k: i32) -> Interval {
    if (-1022..=1023).contains(&k) {
        Interval::point(f64::from_bits(((k + 1023) as u64) << 52))
    } else if k < -1022 {
        pow2(-1022) * pow2(k + 1022)
    } else {
        Interval::raw(f64::MAX, f64::INFINITY)
    }
}

fn ln_point(x: f64) -> Result<Interval, IntervalError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(IntervalError::NonPositiveLog(Interval::point(x)));
    }
    if x == 1.0 {
        return Ok(Interval::ZERO);
    }
    let (mut m, mut e) = frexp1(x);
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        e += 1;
    }
    // ln m = 2 atanh(z), z = (m-1)/(m+1), |z| < 0.1716
    let z = Interval::point(m - 1.0).try_div(Interval::point(m) + Interval::ONE)?;
    let z2 = z.square();
    let mut p = Interval::ONE.try_div(Interval::point((2 * LN_TERMS + 1) as f64))?;
    for j in (0..LN_TERMS).rev() {
        p = p * z2 + Interval::ONE.try_div(Interval::point((2 * j + 1) as f64))?;
    }
    let zm = z.mag();
    let mut rem = zm;
    for _ in 0..(2 * LN_TERMS + 2) {
        rem = mul_up(rem, zm);
    }
    let denom = mul_dn((2 * LN_TERMS + 3) as f64, add_dn(1.0, -mul_up(zm, zm)));
    rem = div_up(rem, denom);
    let atanh = z * p + Interval::raw(-rem, rem);
    let lnm = atanh + atanh;
    Ok(Interval::point(e as f64) * iv_ln2() + lnm)
}

/// `x = m * 2^e` with `m` in `[1, 2)`.
fn frexp1(x: f64) -> (f64, i32) {
    let (x, shift) = if x < f64::MIN_POSITIVE {
        (x * 18014398509481984.0, -54)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1023u64 << 52));
    (m, e + shift)
}
