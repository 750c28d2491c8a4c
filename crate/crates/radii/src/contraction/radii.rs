//! Radii polynomials, the numerical search for `r` and its rigorous check.

use std::fmt;

use crate::interval::Interval;
use crate::seqspace::weight_iv;

use super::bounds::ZBounds;
use super::{ContractionError, SegmentData};

/// `P_j(r) = a_j r² + b_j r + c_j` at `s = 1`, for `j` over the `d` slot and
/// the components of modes `0..=M`.
#[derive(Debug, Clone)]
pub struct RadiiPolynomials {
    pub a: Vec<Interval>,
    pub b: Vec<Interval>,
    pub c: Vec<Interval>,
    /// The ball half-widths per unit radius: `1/ρ`, then `1/ω_n` thrice.
    pub w1: Vec<Interval>,
    pub m: usize,
    pub big_m: usize,
}

/// Where a polynomial index sits in the bound structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    D,
    /// Mode `n < m`, handled by the dense block of `J`.
    Block { n: usize, c: usize },
    /// Mode `m ≤ n < M`.
    Middle { n: usize, c: usize },
    /// The uniform tail `n ≥ M`.
    Tail { c: usize },
}

impl RadiiPolynomials {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn kind(&self, j: usize) -> IndexKind {
        if j == 0 {
            return IndexKind::D;
        }
        let (n, c) = ((j - 1) / 3, (j - 1) % 3);
        if n < self.m {
            IndexKind::Block { n, c }
        } else if n < self.big_m {
            IndexKind::Middle { n, c }
        } else {
            IndexKind::Tail { c }
        }
    }

    /// `P_j([r, r])` in interval arithmetic.
    pub fn eval(&self, j: usize, r: Interval) -> Interval {
        self.a[j] * r.square() + self.b[j] * r + self.c[j]
    }
}

/// `a = Z_quad`, `b = Z_lin − W₁`, `c = Y`.
pub fn assemble_radii(
    y: &[Interval],
    z: &ZBounds,
    seg: &SegmentData,
) -> Result<RadiiPolynomials, ContractionError> {
    let total = seg.n_polys();
    if y.len() != total || z.lin.len() != total || z.quad.len() != total {
        return Err(ContractionError::BadSegment("bound vectors have the wrong length".into()));
    }
    let q = seg.space.q_iv();
    let mut w1 = Vec::with_capacity(total);
    w1.push(seg.space.rho_iv().recip()?);
    for n in 0..=seg.big_m() {
        let w = weight_iv(n, q).recip()?;
        w1.extend([w, w, w]);
    }
    let mut c: Vec<Interval> = y.iter().map(|v| v.mag_iv()).collect();
    for v in &mut c[total - 3..] {
        *v = Interval::ZERO;
    }
    Ok(RadiiPolynomials {
        a: z.quad.iter().map(|v| v.mag_iv()).collect(),
        b: z.lin.iter().zip(&w1).map(|(l, w)| l.mag_iv() - *w).collect(),
        c,
        w1,
        m: seg.m,
        big_m: seg.big_m(),
    })
}

/// Why no common radius exists.
#[derive(Debug, Clone, PartialEq)]
pub struct EmptyReport {
    /// Indices whose own admissible set `I_j` is empty.
    pub empty: Vec<usize>,
    /// Indices whose nonempty sets do not overlap: the one with the largest
    /// lower end and the one with the smallest upper end.
    pub disjoint: Vec<usize>,
    pub m: usize,
    pub big_m: usize,
}

impl EmptyReport {
    pub fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.empty.iter().chain(self.disjoint.iter()).copied()
    }
}

impl fmt::Display for EmptyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "empty sets at {:?}, disjoint sets at {:?}", self.empty, self.disjoint)
    }
}

/// Outcome of the numerical radius search.
#[derive(Debug, Clone, PartialEq)]
pub enum RSearch {
    Found { lo: f64, hi: f64 },
    Empty(EmptyReport),
}

/// `{r > 0 : a r² + b r + c < 0}` for float coefficients, as an open
/// interval, or `None`.
pub fn negative_set(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    if a < 0.0 || c < 0.0 || !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return None;
    }
    if a == 0.0 {
        return (b < 0.0).then(|| (c / -b, f64::INFINITY));
    }
    if b >= 0.0 {
        return None;
    }
    if c == 0.0 {
        return Some((0.0, -b / a));
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return None;
    }
    let t = 0.5 * (-b + disc.sqrt());
    Some((c / t, t / a))
}

/// Intersects the admissible sets of all polynomials, using the upper end
/// of each coefficient (they are upper bounds, so their midpoints mean
/// nothing).
pub fn find_r(p: &RadiiPolynomials) -> RSearch {
    let mut empty = Vec::new();
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let (mut arg_lo, mut arg_hi) = (None, None);
    for j in 0..p.len() {
        match negative_set(p.a[j].hi(), p.b[j].hi(), p.c[j].hi()) {
            None => empty.push(j),
            Some((l, h)) => {
                if l > lo {
                    lo = l;
                    arg_lo = Some(j);
                }
                if h < hi {
                    hi = h;
                    arg_hi = Some(j);
                }
            }
        }
    }
    let mut disjoint = Vec::new();
    if empty.is_empty() && lo < hi {
        return RSearch::Found { lo, hi };
    }
    if lo >= hi {
        disjoint.extend(arg_lo);
        if arg_hi != arg_lo {
            disjoint.extend(arg_hi);
        }
    }
    RSearch::Empty(EmptyReport {
        empty,
        disjoint,
        m: p.m,
        big_m: p.big_m,
    })
}

/// Radii to try inside `(lo, hi)`: the geometric mean first, then ten
/// log-spaced points.
pub(crate) fn candidates(lo: f64, hi: f64) -> Vec<f64> {
    let hi_eff = if hi.is_finite() { hi } else { lo.max(f64::MIN_POSITIVE) * 1e6 };
    let lo_eff = lo.max(f64::EPSILON * hi_eff);
    let (a, b) = (lo_eff.ln(), hi_eff.ln());
    let mut out = vec![(0.5 * (a + b)).exp()];
    for k in 1..=10 {
        out.push((a + (b - a) * k as f64 / 11.0).exp());
    }
    out.retain(|r| *r > lo && *r < hi && r.is_finite());
    out
}

/// A radius at which every polynomial is provably negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifiedRadius {
    pub r: f64,
    /// The numerical admissible interval `r` was drawn from.
    pub candidate_interval: (f64, f64),
    /// Enclosure of `‖Z(r)‖/r`.
    pub kappa_bound: Interval,
}

/// Evaluates every polynomial at `[r, r]` and bounds the contraction
/// constant `max_j (a_j r + b_j + w_j)/w_j`.
pub fn rigorous_verify(
    p: &RadiiPolynomials,
    r: f64,
    candidate_interval: (f64, f64),
) -> Result<VerifiedRadius, ContractionError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(ContractionError::VerificationFailed { r, indices: vec![] });
    }
    let ri = Interval::point(r);
    let bad: Vec<usize> = (0..p.len())
        .filter(|&j| !p.eval(j, ri).strictly_negative())
        .collect();
    if !bad.is_empty() {
        return Err(ContractionError::VerificationFailed { r, indices: bad });
    }
    let mut kappa = Interval::ZERO;
    for j in 0..p.len() {
        let k = (p.a[j] * ri + p.b[j] + p.w1[j]).try_div(p.w1[j])?;
        kappa = kappa.max(k.mag_iv());
    }
    if !(kappa.hi() < 1.0) {
        return Err(ContractionError::VerificationFailed { r, indices: vec![] });
    }
    Ok(VerifiedRadius {
        r,
        candidate_interval,
        kappa_bound: kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_root_interval() {
        let (lo, hi) = negative_set(1.0, -2.0, 0.5).unwrap();
        assert!((lo - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((hi - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
        assert!(negative_set(1.0, -1.0, 1.0).is_none());
        assert_eq!(negative_set(2.0, -1.0, 0.0), Some((0.0, 0.5)));
        assert_eq!(negative_set(0.0, -2.0, 1.0), Some((0.5, f64::INFINITY)));
    }

    #[test]
    fn candidates_stay_inside() {
        for r in candidates(1e-9, 1e-3) {
            assert!(r > 1e-9 && r < 1e-3);
        }
        assert!(!candidates(0.0, 1.0).is_empty());
    }
}
