//! Cosine coefficient sequences, algebraic weights and the discrete
//! convolution.
//!
//! A sequence `c` stands for `c(ξ) = c_0/2 + Σ_{k≥1} c_k cos(kπξ)`; entries
//! past the stored length are zero.  A point `U = (d, x, y, z)` is laid out as
//! a flat vector `(d, x_0, y_0, z_0, x_1, y_1, z_1, ...)` whenever linear
//! algebra is involved.

use std::ops::{Deref, Index};

use thiserror::Error;

use crate::interval::Interval;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("decay rate q must be > 1, got {0}")]
    BadDecay(f64),
    #[error("scaling rho must be > 0, got {0}")]
    BadRho(f64),
    #[error("component lengths differ: x={0}, y={1}, z={2}")]
    LengthMismatch(usize, usize, usize),
    #[error("projection size must be positive")]
    EmptySequence,
    #[error("flat vector of length {got} does not match 3m+1 for m={m}")]
    FlatLength { got: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosineSeq<T = f64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> CosineSeq<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        CosineSeq { coeffs }
    }

    pub fn zeros(m: usize) -> Self {
        CosineSeq {
            coeffs: vec![T::zero(); m],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    /// Coefficient `n`, zero past the stored length.
    #[inline]
    pub fn get(&self, n: usize) -> T {
        self.coeffs.get(n).copied().unwrap_or_else(T::zero)
    }

    pub fn resize(&self, m_new: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(m_new, T::zero());
        CosineSeq { coeffs: c }
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(T) -> S) -> CosineSeq<S> {
        CosineSeq {
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }
}

impl<T> Deref for CosineSeq<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.coeffs
    }
}

impl<T> Index<usize> for CosineSeq<T> {
    type Output = T;
    fn index(&self, n: usize) -> &T {
        &self.coeffs[n]
    }
}

/// `U = (d, u)` with `u_n = (x_n, y_n, z_n)` for `n < m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosinePoint<T = f64> {
    pub d: T,
    pub x: CosineSeq<T>,
    pub y: CosineSeq<T>,
    pub z: CosineSeq<T>,
}

impl<T: Scalar> CosinePoint<T> {
    pub fn new(d: T, x: Vec<T>, y: Vec<T>, z: Vec<T>) -> Result<Self, SeqError> {
        if x.len() != y.len() || x.len() != z.len() {
            return Err(SeqError::LengthMismatch(x.len(), y.len(), z.len()));
        }
        if x.is_empty() {
            return Err(SeqError::EmptySequence);
        }
        Ok(CosinePoint {
            d,
            x: CosineSeq::new(x),
            y: CosineSeq::new(y),
            z: CosineSeq::new(z),
        })
    }

    pub fn zeros(m: usize) -> Self {
        CosinePoint {
            d: T::zero(),
            x: CosineSeq::zeros(m),
            y: CosineSeq::zeros(m),
            z: CosineSeq::zeros(m),
        }
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    /// Length of the flat layout, `3m + 1`.
    pub fn dim(&self) -> usize {
        3 * self.m() + 1
    }

    pub fn comp(&self, c: usize) -> &CosineSeq<T> {
        match c {
            0 => &self.x,
            1 => &self.y,
            _ => &self.z,
        }
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut CosineSeq<T> {
        match c {
            0 => &mut self.x,
            1 => &mut self.y,
            _ => &mut self.z,
        }
    }

    /// `u_n`, zero past the stored length.
    #[inline]
    pub fn u(&self, n: usize) -> [T; 3] {
        [self.x.get(n), self.y.get(n), self.z.get(n)]
    }

    pub fn to_flat(&self) -> Vec<T> {
        let m = self.m();
        let mut v = Vec::with_capacity(3 * m + 1);
        v.push(self.d);
        for n in 0..m {
            v.extend_from_slice(&self.u(n));
        }
        v
    }

    pub fn from_flat(v: &[T]) -> Result<Self, SeqError> {
        if v.len() < 4 || !(v.len() - 1).is_multiple_of(3) {
            return Err(SeqError::FlatLength {
                got: v.len(),
                m: v.len().saturating_sub(1) / 3,
            });
        }
        let m = (v.len() - 1) / 3;
        let pick = |c: usize| (0..m).map(|n| v[1 + 3 * n + c]).collect::<Vec<T>>();
        CosinePoint::new(v[0], pick(0), pick(1), pick(2))
    }

    /// Zero-pads or truncates every component to `m_new` coefficients.
    pub fn resize(&self, m_new: usize) -> Self {
        CosinePoint {
            d: self.d,
            x: self.x.resize(m_new),
            y: self.y.resize(m_new),
            z: self.z.resize(m_new),
        }
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(T) -> S + Copy) -> CosinePoint<S> {
        CosinePoint {
            d: f(self.d),
            x: self.x.map(f),
            y: self.y.map(f),
            z: self.z.map(f),
        }
    }

    /// Componentwise `self + s * other` (shorter operand zero-padded).
    pub fn add_scaled(&self, other: &Self, s: T) -> Self {
        let m = self.m().max(other.m());
        let a = self.resize(m);
        let b = other.resize(m);
        let zip = |p: &CosineSeq<T>, q: &CosineSeq<T>| {
            CosineSeq::new(p.iter().zip(q.iter()).map(|(&u, &v)| u + s * v).collect())
        };
        CosinePoint {
            d: a.d + s * b.d,
            x: zip(&a.x, &b.x),
            y: zip(&a.y, &b.y),
            z: zip(&a.z, &b.z),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, -T::from_f64(1.0))
    }

    /// Euclidean inner product of the flat layouts.
    pub fn dot(&self, other: &Self) -> T {
        self.to_flat()
            .iter()
            .zip(other.to_flat().iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }
}

impl CosinePoint<f64> {
    pub fn to_interval(&self) -> CosinePoint<Interval> {
        self.map(Interval::point)
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// Bitwise equality, treating missing trailing coefficients as `+0.0`.
    pub fn bit_eq_padded(&self, other: &Self) -> bool {
        let m = self.m().max(other.m());
        let a = self.resize(m).to_flat();
        let b = other.resize(m).to_flat();
        a.iter().zip(b.iter()).all(|(p, q)| p.to_bits() == q.to_bits())
    }
}

/// Decay rate and parameter scaling of the weighted space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    q: f64,
    rho: f64,
}

impl SpaceParams {
    pub fn new(q: f64, rho: f64) -> Result<Self, SeqError> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(SeqError::BadDecay(q));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(SeqError::BadRho(rho));
        }
        Ok(SpaceParams { q, rho })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn q_iv(&self) -> Interval {
        Interval::point(self.q)
    }

    pub fn rho_iv(&self) -> Interval {
        Interval::point(self.rho)
    }

    pub fn weight(&self, n: usize) -> Interval {
        weight_iv(n, self.q_iv())
    }

    /// `ω_0, ..., ω_{len-1}`.
    pub fn weights(&self, len: usize) -> Vec<Interval> {
        (0..len).map(|n| self.weight(n)).collect()
    }
}

/// `ω_n^q`: one for `n = 0`, `n^q` otherwise.
pub fn weight(n: usize, q: f64) -> Interval {
    weight_iv(n, Interval::point(q))
}

pub fn weight_iv(n: usize, q: Interval) -> Interval {
    if n <= 1 {
        return Interval::ONE;
    }
    Interval::point(n as f64)
        .pow_real(q)
        .expect("positive base")
}

/// `max_n |u_n|_∞ ω_n^q` over the stored coefficients.
pub fn norm_q<T: Scalar + Into<Interval>>(
    x: &[T],
    y: &[T],
    z: &[T],
    space: &SpaceParams,
) -> Interval {
    let m = x.len().max(y.len()).max(z.len());
    let at = |s: &[T], n: usize| -> f64 { s.get(n).map(|&v| v.into().mag()).unwrap_or(0.0) };
    let mut out = Interval::ZERO;
    for n in 0..m {
        let mag = at(x, n).max(at(y, n)).max(at(z, n));
        if mag > 0.0 {
            out = out.max(Interval::point(mag) * space.weight(n));
        }
    }
    out
}

/// `max(|d|/ρ, ‖u‖_q)`.
pub fn norm_u<T: Scalar + Into<Interval>>(u: &CosinePoint<T>, space: &SpaceParams) -> Interval {
    let d: Interval = u.d.into();
    let dpart = d.abs().try_div(space.rho_iv()).expect("rho > 0");
    dpart.max(norm_q(&u.x, &u.y, &u.z, space))
}

/// `[φ∗ψ]_n = ½ Σ_k φ_|k| ψ_|n−k|` over `|k| < len(φ)`, `|n−k| < len(ψ)`.
#[inline]
pub fn conv<T: Scalar>(phi: &[T], psi: &[T], n: usize) -> T {
    conv_by(phi, psi.len(), |j| psi[j], n)
}

/// Convolution against a sequence given by a closure with `psi_len` nonzero
/// leading entries (`usize::MAX` for an unbounded sequence).
pub fn conv_by<T: Scalar>(phi: &[T], psi_len: usize, psi: impl Fn(usize) -> T, n: usize) -> T {
    let mp = phi.len() as i64;
    if mp == 0 || psi_len == 0 {
        return T::zero();
    }
    let n = n as i64;
    let reach = psi_len.min(i64::MAX as usize / 4) as i64 - 1;
    let lo = (-(mp - 1)).max(n - reach);
    let hi = (mp - 1).min(n + reach);
    let mut acc = T::zero();
    for k in lo..=hi {
        acc = acc + phi[k.unsigned_abs() as usize] * psi((n - k).unsigned_abs() as usize);
    }
    acc.half()
}

/// `∂[φ∗ψ]_n / ∂φ_k` for sequences truncated to `len(ψ)`.
#[inline]
pub fn dconv<T: Scalar>(psi: &[T], n: usize, k: usize) -> T {
    let at = |j: usize| psi.get(j).copied().unwrap_or_else(T::zero);
    if k == 0 {
        at(n).half()
    } else {
        (at(n.abs_diff(k)) + at(n + k)).half()
    }
}

/// Non-rigorous point evaluation, for plotting.
pub fn eval_at(c: &[f64], xi: f64) -> f64 {
    let mut s = c.first().copied().unwrap_or(0.0) / 2.0;
    for (k, &ck) in c.iter().enumerate().skip(1) {
        s += ck * (k as f64 * std::f64::consts::PI * xi).cos();
    }
    s
}

/// `z(0) = z_0/2 + Σ z_n`.
pub fn z_at_zero(u: &CosinePoint<f64>) -> f64 {
    u.z.first().copied().unwrap_or(0.0) / 2.0 + u.z.iter().skip(1).sum::<f64>()
}

/// Interval enclosure of `z(0)` for the stored coefficients.
pub fn z_at_zero_iv(u: &CosinePoint<f64>) -> Interval {
    let mut s = Interval::point(u.z.first().copied().unwrap_or(0.0)).half();
    for &c in u.z.iter().skip(1) {
        s += Interval::point(c);
    }
    s
}

/// The box `B(U, r) = U + [−r/ρ, r/ρ] × Π_n [−r/ω_n, r/ω_n]³`.
#[derive(Debug, Clone)]
pub struct BallSpec {
    pub center: CosinePoint<f64>,
    pub r: f64,
    pub space: SpaceParams,
}

impl BallSpec {
    fn fits(&self, v: &CosinePoint<f64>, inside: bool) -> bool {
        let r = Interval::point(self.r);
        let dev = |a: f64, b: f64| (Interval::point(a) - Interval::point(b)).abs();
        let within = |diff: Interval, bound: Interval| {
            if inside {
                diff.hi() <= bound.lo()
            } else {
                diff.lo() <= bound.hi()
            }
        };
        let dr = r.try_div(self.space.rho_iv()).expect("rho > 0");
        if !within(dev(v.d, self.center.d), dr) {
            return false;
        }
        let m = v.m().max(self.center.m());
        (0..m).all(|n| {
            let bound = r.try_div(self.space.weight(n)).expect("positive weight");
            let (a, b) = (v.u(n), self.center.u(n));
            (0..3).all(|c| within(dev(a[c], b[c]), bound))
        })
    }

    /// True only if `v` is certainly in the ball.
    pub fn contains(&self, v: &CosinePoint<f64>) -> bool {
        self.fits(v, true)
    }

    /// True only if `v` is certainly outside the ball.
    pub fn excludes(&self, v: &CosinePoint<f64>) -> bool {
        !self.fits(v, false)
    }
}
