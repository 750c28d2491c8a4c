//! Analytic bounds on weighted convolution sums.
//!
//! For `q > 1` and weights `ω_n = max(1, n)^q`, define
//! `Ψ_n = Σ_{k∈Z} ω_n / (ω_k ω_{n−k})`.  [`alpha`] gives rigorous upper
//! bounds `α_n ≥ Ψ_n`: exact finite sums plus an integral tail for small `n`,
//! and a uniform value for every `n ≥ M`.  The uniform value depends on the
//! regime of `q`, split at `q*(M)`, the zero of [`chi`].
//!
//! For `n < M` the sharper constants `C_n(K) + ε_n(K)` of
//! [`sharp_conv_const`] are used instead: they bound `|[x∗y]_n|` by
//! `½ (C_n + ε_n) ‖x‖_q ‖y‖_q` directly.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use thiserror::Error;

use crate::interval::{iv_pi, Interval, IntervalError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("q = {0} outside the admissible domain {1}")]
    DomainError(f64, &'static str),
    #[error("index {n} is not below the truncation K = {k}")]
    IndexTooLarge { n: usize, k: usize },
    #[error("sharper tail needs n0 = {needed}, above the cap {cap}")]
    BudgetExceeded { needed: usize, cap: usize },
    #[error("M = {0} is below the minimum of 6")]
    SmallM(usize),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Parameters of the convolution estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateParams {
    pub q: f64,
    /// Truncation `K` of the zeta-type sums in the tail estimate.
    pub k: usize,
    /// Index `M` from which the uniform tail bound is used.
    pub big_m: usize,
    /// Truncation `K` of the sharp finite-`n` constants.
    pub k_sharp: usize,
    /// Target `ε` of the refined tail bound; `None` keeps the closed form.
    pub sharper_tail: Option<f64>,
}

impl EstimateParams {
    pub fn new(q: f64, k: usize, big_m: usize) -> Result<Self, EstimateError> {
        let ep = EstimateParams {
            q,
            k,
            big_m,
            k_sharp: 3 * big_m,
            sharper_tail: None,
        };
        ep.validate()?;
        Ok(ep)
    }

    pub fn validate(&self) -> Result<(), EstimateError> {
        if !(self.q > 1.0) || !self.q.is_finite() {
            return Err(EstimateError::DomainError(self.q, "q > 1"));
        }
        if self.big_m < 6 {
            return Err(EstimateError::SmallM(self.big_m));
        }
        if self.k < 2 || self.k_sharp < self.big_m + 1 {
            return Err(EstimateError::IndexTooLarge {
                n: self.big_m,
                k: self.k_sharp,
            });
        }
        Ok(())
    }

    fn q_iv(&self) -> Interval {
        Interval::point(self.q)
    }
}

fn int(n: usize) -> Interval {
    Interval::point(n as f64)
}

/// `1/k^q` for `k = 0..len` (entry 0 is `1/ω_0 = 1`).
fn inv_weights(q: Interval, len: usize) -> Result<Vec<Interval>, EstimateError> {
    (0..len)
        .into_par_iter()
        .map(|k| {
            if k <= 1 {
                Ok(Interval::ONE)
            } else {
                Ok(int(k).pow_real(q)?.recip()?)
            }
        })
        .collect()
}

/// `S_K + 1/((q−1) K^{q−1})`, an upper enclosure of `ζ(q)`, returned as the
/// pair `(S_K, tail)`.  Memoised per `(q, K)`.
pub fn zeta_parts(q: f64, k: usize) -> Result<(Interval, Interval), EstimateError> {
    type Cache = Mutex<HashMap<(u64, usize), (Interval, Interval)>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(q.to_bits(), k)) {
        return Ok(*v);
    }
    let qi = Interval::point(q);
    let inv = inv_weights(qi, k + 1)?;
    // Sum smallest terms first.
    let s = inv[1..].iter().rev().fold(Interval::ZERO, |acc, &v| acc + v);
    let tail = zeta_tail(qi, k)?;
    cache.lock().unwrap().insert((q.to_bits(), k), (s, tail));
    Ok((s, tail))
}

/// `1/((q−1) K^{q−1})`.
fn zeta_tail(q: Interval, k: usize) -> Result<Interval, EstimateError> {
    let qm1 = q - Interval::ONE;
    Ok((qm1 * int(k).pow_real(qm1)?).recip()?)
}

/// `χ_n(q)` with `j = ⌊n/2⌋` and `c = 2 − (2/3)^q`:
/// `(q/(2−q) + q(q−1)/(2(3−q)) + q(q−1)/(2j) + c/j − c/(q−1)) / j^{q−1}`.
pub fn chi(n: usize, q: Interval) -> Result<Interval, EstimateError> {
    if !(q.lo() > 1.0 && q.hi() < 2.0) {
        return Err(EstimateError::DomainError(q.mid(), "1 < q < 2"));
    }
    if n < 2 {
        return Err(EstimateError::SmallM(n));
    }
    let (a, b) = chi_parts(q)?;
    let j = int(n / 2);
    let qm1 = q - Interval::ONE;
    Ok((a + b.try_div(j)?).try_div(j.pow_real(qm1)?)?)
}

/// `χ_n = (A + B/j) / j^{q−1}`; returns `(A, B)`, with `B > 0`.
fn chi_parts(q: Interval) -> Result<(Interval, Interval), EstimateError> {
    let one = Interval::ONE;
    let two = Interval::point(2.0);
    let three = Interval::point(3.0);
    let c = two - two.try_div(three)?.pow_real(q)?;
    let qq = q * (q - one);
    let a = q.try_div(two - q)? + qq.try_div(two * (three - q))? - c.try_div(q - one)?;
    let b = qq.half() + c;
    Ok((a, b))
}

/// Enclosure of `q*(M)`, the unique zero of `χ_M` on `(1, 2)`, by bisection
/// down to width `1e-7`.
pub fn q_star(big_m: usize) -> Result<Interval, EstimateError> {
    if big_m < 6 {
        return Err(EstimateError::SmallM(big_m));
    }
    let (mut lo, mut hi) = (1.0 + 1e-9, 2.0 - 1e-9);
    debug_assert!(chi(big_m, Interval::point(lo))?.strictly_negative());
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        let v = chi(big_m, Interval::point(mid))?;
        if v.hi() < 0.0 {
            lo = mid;
        } else if v.lo() > 0.0 {
            hi = mid;
        } else {
            break;
        }
    }
    Ok(Interval::raw(lo, hi))
}

/// Which form the uniform tail bound took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaBranch {
    /// `χ_M(q) < 0`.
    BelowQStar,
    /// `χ_M(q) ≥ 0` (or undecided), the bound carries `+2 max(χ_M, 0)`.
    AboveQStar,
    /// `q ≥ 2`, closed form.
    Large,
}

impl GammaBranch {
    pub fn label(&self) -> &'static str {
        match self {
            GammaBranch::BelowQStar => "1<q<q*(M)",
            GammaBranch::AboveQStar => "q*(M)<=q<2",
            GammaBranch::Large => "q>=2",
        }
    }
}

/// `γ_M^q(K)` and the branch that produced it.
pub fn gamma(ep: &EstimateParams) -> Result<(Interval, GammaBranch), EstimateError> {
    ep.validate()?;
    let q = ep.q_iv();
    if ep.q >= 2.0 {
        let m = int(ep.big_m);
        let one = Interval::ONE;
        let two = Interval::point(2.0);
        let pi = iv_pi();
        let first = two * m.try_div(m - one)?.pow_real(q)?;
        let log_term = Interval::point(4.0) * (m - two).ln()?.try_div(m)?
            + (pi.square() - Interval::point(6.0)).try_div(Interval::point(3.0))?;
        let base = two.try_div(m)? + one.half();
        let pow = if ep.q == 2.0 {
            one
        } else {
            base.pow_real(q - two)?
        };
        return Ok((first + log_term * pow, GammaBranch::Large));
    }
    let (s, tail) = zeta_parts(ep.q, ep.k)?;
    let base = Interval::point(2.0) * (s + tail);
    let c = chi(ep.big_m, q)?;
    if c.strictly_negative() {
        Ok((base, GammaBranch::BelowQStar))
    } else {
        let clamped = Interval::raw(c.lo().max(0.0), c.hi().max(0.0));
        Ok((base + clamped + clamped, GammaBranch::AboveQStar))
    }
}

/// `2 S_K + 2/((q−1)K^{q−1})`, shared by every case of `α`.
fn common(ep: &EstimateParams) -> Result<Interval, EstimateError> {
    let (s, tail) = zeta_parts(ep.q, ep.k)?;
    Ok(Interval::point(2.0) * (s + tail))
}

/// `Σ_{k=1}^{n−1} n^q / (k^q (n−k)^q)` from a table of `1/k^q`.
fn inner_sum(n: usize, inv: &[Interval], q: Interval) -> Result<Interval, EstimateError> {
    if n < 2 {
        return Ok(Interval::ZERO);
    }
    let s: Interval = (1..n).map(|k| inv[k] * inv[n - k]).sum();
    Ok(int(n).pow_real(q)? * s)
}

/// `α_n^q(K)`: upper bound of `Ψ_n^q`.
pub fn alpha(n: usize, ep: &EstimateParams) -> Result<Interval, EstimateError> {
    ep.validate()?;
    let base = common(ep)?;
    if n == 0 {
        return Ok(Interval::ONE + base);
    }
    let two = Interval::point(2.0);
    if n < ep.big_m {
        let inv = inv_weights(ep.q_iv(), n)?;
        return Ok(two + base + inner_sum(n, &inv, ep.q_iv())?);
    }
    Ok(two + base + gamma(ep)?.0)
}

/// `C_n(K) + ε_n(K)` from a table of `1/ω_k` for `k < K`.
fn sharp_from_table(n: usize, k: usize, inv: &[Interval], q: Interval) -> Result<Interval, EstimateError> {
    let ki = k as i64;
    let ni = n as i64;
    let lo = (ni - ki + 1).max(-(ki - 1));
    let hi = (ki - 1).min(ni + ki - 1);
    let mut c = Interval::ZERO;
    for n1 in lo..=hi {
        c += inv[n1.unsigned_abs() as usize] * inv[(ni - n1).unsigned_abs() as usize];
    }
    let qm1 = q - Interval::ONE;
    let pre = Interval::point(2.0).try_div(qm1 * int(k - 1).pow_real(qm1)?)?;
    let e = int(k - n).pow_real(q)?.recip()? + int(k + n).pow_real(q)?.recip()?;
    Ok(c + pre * e)
}

/// `C_n(K) + ε_n(K)` with `K = ep.k_sharp`.
pub fn sharp_conv_const(n: usize, ep: &EstimateParams) -> Result<Interval, EstimateError> {
    ep.validate()?;
    if n >= ep.k_sharp {
        return Err(EstimateError::IndexTooLarge { n, k: ep.k_sharp });
    }
    let inv = inv_weights(ep.q_iv(), ep.k_sharp)?;
    sharp_from_table(n, ep.k_sharp, &inv, ep.q_iv())
}

/// The refined uniform bound for `n ≥ M` when `q*(M) ≤ q < 2`: every `n`
/// beyond `n0` obeys `Ψ_n ≤ 2 + 4ζ(q) + 2ε`, and the finitely many
/// `M ≤ n < n0` are bounded by their explicit finite sums.
pub fn alpha_tail_sharper(
    ep: &EstimateParams,
    eps_target: f64,
    cap: usize,
) -> Result<Interval, EstimateError> {
    ep.validate()?;
    if !(ep.q < 2.0) {
        return Err(EstimateError::DomainError(ep.q, "q < 2"));
    }
    let q = ep.q_iv();
    let (a, b) = chi_parts(q)?;
    let a_pos = Interval::raw(a.lo().max(0.0), a.hi().max(0.0));
    let qm1 = q - Interval::ONE;
    let eps = Interval::point(eps_target);
    // Upper bound of χ_n for j = ⌊n/2⌋ ≥ j0; decreasing in j.
    let bound_at = |j: usize| -> Result<Interval, EstimateError> {
        let jj = int(j);
        Ok((a_pos + b.try_div(jj)?).try_div(jj.pow_real(qm1)?)?)
    };
    let below = |j: usize| -> Result<bool, EstimateError> { Ok(bound_at(j)?.hi() < eps.lo()) };
    let j_start = (ep.big_m / 2).max(1);
    let mut j0 = j_start;
    if !below(j0)? {
        let mut hi = j0.max(1) * 2;
        loop {
            if 2 * hi > cap {
                if below(cap / 2)? {
                    hi = cap / 2;
                    break;
                }
                return Err(EstimateError::BudgetExceeded {
                    needed: 2 * hi,
                    cap,
                });
            }
            if below(hi)? {
                break;
            }
            hi *= 2;
        }
        let mut lo = j0;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if below(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        j0 = hi;
    }
    let n0 = (2 * j0).max(ep.big_m);
    let (s, tail) = zeta_parts(ep.q, ep.k)?;
    let four = Interval::point(4.0);
    let two = Interval::point(2.0);
    let uniform = two + four * (s + tail) + eps + eps;
    if n0 <= ep.big_m {
        return Ok(uniform);
    }
    let inv = inv_weights(q, n0)?;
    let base = two + two * (s + tail);
    let explicit: Vec<Interval> = (ep.big_m..n0)
        .into_par_iter()
        .map(|n| Ok(base + inner_sum(n, &inv, q)?))
        .collect::<Result<_, EstimateError>>()?;
    Ok(explicit.into_iter().fold(uniform, |acc, v| acc.max(v)))
}

/// Literal partial sum of `Ψ_n^q = Σ_k ω_n/(ω_k ω_{n−k})` over
/// `|k| ≤ terms` (and up to `n + terms` on the positive side), in floats.
/// A test oracle only.
pub fn psi_oracle(n: usize, q: f64, terms: usize) -> f64 {
    let w = |k: i64| -> f64 {
        if k == 0 {
            1.0
        } else {
            (k.unsigned_abs() as f64).powf(q)
        }
    };
    let ni = n as i64;
    let wn = w(ni);
    let t = terms as i64;
    let mut s = 0.0;
    for k in (-t..=ni + t).rev() {
        s += wn / (w(k) * w(ni - k));
    }
    s
}

/// All estimate constants needed for one projection size.
#[derive(Debug, Clone)]
pub struct AlphaTable {
    pub params: EstimateParams,
    /// `α_n` for `n < M`, then the uniform tail value at index `M`.
    pub alpha: Vec<Interval>,
    /// `C_n(K) + ε_n(K)` for `n < M`.
    pub cq: Vec<Interval>,
    pub branch: GammaBranch,
    pub q_star: Option<Interval>,
}

impl AlphaTable {
    pub fn new(ep: &EstimateParams) -> Result<Self, EstimateError> {
        ep.validate()?;
        let q = ep.q_iv();
        let m = ep.big_m;
        let base = common(ep)?;
        let two = Interval::point(2.0);
        let inv_m = inv_weights(q, m)?;
        let mut alpha: Vec<Interval> = (0..m)
            .into_par_iter()
            .map(|n| {
                if n == 0 {
                    Ok(Interval::ONE + base)
                } else {
                    Ok(two + base + inner_sum(n, &inv_m, q)?)
                }
            })
            .collect::<Result<_, EstimateError>>()?;
        let (g, branch) = gamma(ep)?;
        let mut tail = two + base + g;
        if let (Some(eps), GammaBranch::AboveQStar) = (ep.sharper_tail, branch) {
            let refined = alpha_tail_sharper(ep, eps, 200_000)?;
            if refined.hi() < tail.hi() {
                tail = refined;
            }
        }
        alpha.push(tail);
        let inv_k = inv_weights(q, ep.k_sharp)?;
        let cq = (0..m)
            .into_par_iter()
            .map(|n| sharp_from_table(n, ep.k_sharp, &inv_k, q))
            .collect::<Result<_, EstimateError>>()?;
        let q_star = if ep.q < 2.0 { Some(q_star(m)?) } else { None };
        Ok(AlphaTable {
            params: *ep,
            alpha,
            cq,
            branch,
            q_star,
        })
    }

    /// The uniform bound used for every `n ≥ M`.
    pub fn tail(&self) -> Interval {
        self.alpha[self.params.big_m]
    }
}
