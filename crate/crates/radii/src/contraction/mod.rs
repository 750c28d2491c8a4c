//! One segment `[Ū₀, Ū₁]` in, one verified tube radius out.
//!
//! The Newton-like operator `T_s(U) = U − J F_s(U)` is shown to be a uniform
//! contraction on `B(Ū_s, r)` for all `s ∈ [0, 1]` by bounding its defect
//! (`Y`) and its derivative over the ball (`Z`) and checking that every radii
//! polynomial `P_j(r) = a_j r² + b_j r + c_j` is negative.  All bound
//! coefficients are nondecreasing in `s`, so they are evaluated at `s = 1`.
//!
//! The ball is the box `|d| ≤ r/ρ`, `|u_n| ≤ r/ω_n` componentwise, and the
//! polynomials are indexed as `0` for `d` and `1 + 3n + c` for component
//! `c ∈ {x, y, z}` of mode `n ≤ M = 2m − 1`.

mod bounds;
mod jop;
mod radii;

pub use bounds::{compute_y, compute_z, sharper_s_bound, YBounds, ZBounds};
pub use jop::{build_j, verify_j_injective, JOperator};
pub use radii::{
    assemble_radii, find_r, rigorous_verify, EmptyReport, IndexKind, RSearch, RadiiPolynomials,
    VerifiedRadius,
};

use thiserror::Error;

use crate::estimates::{AlphaTable, EstimateError, EstimateParams};
use crate::interval::{Interval, IntervalError};
use crate::mimura::{ModelError, ModelParams};
use crate::seqspace::{CosinePoint, SeqError, SpaceParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContractionError {
    #[error("the bordered Jacobian is numerically singular")]
    SingularJacobian,
    #[error("injectivity of J not verified: {reason}")]
    InjectivityUnverified { reason: String },
    #[error("tail blocks not monotone from M = {big_m}; need M ≥ {needed}")]
    TailNotMonotone { big_m: usize, needed: usize },
    #[error("no admissible radius: {0}")]
    NoRadius(EmptyReport),
    #[error("radii polynomials not provably negative at r = {r:e} (indices {indices:?})")]
    VerificationFailed { r: f64, indices: Vec<usize> },
    #[error("segment data: {0}")]
    BadSegment(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// Truncation choices for the convolution estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateSettings {
    /// `K` in the zeta-type tail sums.
    pub k_tail: usize,
    /// `K / M` for the sharp finite-`n` constants.
    pub k_sharp_factor: usize,
    /// Opt-in refined tail bound with this `ε`.
    pub sharper_tail: Option<f64>,
}

impl Default for EstimateSettings {
    fn default() -> Self {
        EstimateSettings {
            k_tail: 10_000,
            k_sharp_factor: 3,
            sharper_tail: None,
        }
    }
}

/// One continuation segment with everything needed to bound it.
#[derive(Debug, Clone)]
pub struct SegmentData {
    pub u0: CosinePoint<f64>,
    pub u1: CosinePoint<f64>,
    pub t0: CosinePoint<f64>,
    pub t1: CosinePoint<f64>,
    pub m: usize,
    pub space: SpaceParams,
    pub ep: EstimateParams,
    pub params: ModelParams,
}

impl SegmentData {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        u0: CosinePoint<f64>,
        u1: CosinePoint<f64>,
        t0: CosinePoint<f64>,
        t1: CosinePoint<f64>,
        space: SpaceParams,
        params: ModelParams,
        est: EstimateSettings,
    ) -> Result<Self, ContractionError> {
        let m = u0.m();
        for (name, p) in [("u1", &u1), ("t0", &t0), ("t1", &t1)] {
            if p.m() != m {
                return Err(ContractionError::BadSegment(format!(
                    "{name} has {} modes, u0 has {m}",
                    p.m()
                )));
            }
        }
        if m < 4 {
            return Err(ContractionError::BadSegment(format!("m = {m} is below 4")));
        }
        let all_finite = [&u0, &u1, &t0, &t1]
            .iter()
            .all(|p| p.to_flat().iter().all(|v| v.is_finite()));
        if !all_finite {
            return Err(ContractionError::BadSegment("non-finite coefficient".into()));
        }
        params.validate()?;
        let big_m = 2 * m - 1;
        let ep = EstimateParams {
            q: space.q(),
            k: est.k_tail,
            big_m,
            k_sharp: est.k_sharp_factor.max(2) * big_m,
            sharper_tail: est.sharper_tail,
        };
        ep.validate()?;
        Ok(SegmentData {
            u0,
            u1,
            t0,
            t1,
            m,
            space,
            ep,
            params,
        })
    }

    /// A zero-length segment at one point.
    pub fn point(
        u: CosinePoint<f64>,
        tangent: CosinePoint<f64>,
        space: SpaceParams,
        params: ModelParams,
        est: EstimateSettings,
    ) -> Result<Self, ContractionError> {
        Self::new(u.clone(), u, tangent.clone(), tangent, space, params, est)
    }

    pub fn big_m(&self) -> usize {
        2 * self.m - 1
    }

    /// Number of polynomials: `1 + 3(M + 1)`.
    pub fn n_polys(&self) -> usize {
        1 + 3 * (self.big_m() + 1)
    }

    /// Size of the finite block: `3m + 1`.
    pub fn dim(&self) -> usize {
        3 * self.m + 1
    }

    pub fn delta_u(&self) -> CosinePoint<Interval> {
        self.u1.to_interval().sub(&self.u0.to_interval())
    }

    pub fn delta_t(&self) -> CosinePoint<Interval> {
        self.t1.to_interval().sub(&self.t0.to_interval())
    }

    pub fn d_hull(&self) -> Interval {
        Interval::hull_of(self.u0.d, self.u1.d)
    }
}

/// Knobs of the proof pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofOptions {
    /// Bound the finite-block defect with the apex-aware quadratic bound too.
    pub sharper_y: bool,
    /// Radius tried before the default choice, if admissible.
    pub target_r: Option<f64>,
}

impl Default for ProofOptions {
    fn default() -> Self {
        ProofOptions {
            sharper_y: true,
            target_r: None,
        }
    }
}

/// Everything a successful proof produced.
#[derive(Debug, Clone)]
pub struct ProofOutcome {
    pub radius: VerifiedRadius,
    pub polys: RadiiPolynomials,
    pub injectivity_margin: Interval,
}

/// The polynomials of a segment, computed rigorously; no radius chosen yet.
pub fn radii_polynomials(
    seg: &SegmentData,
    opts: &ProofOptions,
) -> Result<(RadiiPolynomials, Interval), ContractionError> {
    let j = build_j(seg)?;
    let margin = verify_j_injective(&j, seg)?;
    let table = AlphaTable::new(&seg.ep)?;
    let y = compute_y(seg, &j)?;
    let z = compute_z(seg, &j, &table)?;
    let yv = if opts.sharper_y { y.combined() } else { y.plain.clone() };
    Ok((assemble_radii(&yv, &z, seg)?, margin))
}

/// The full pipeline: build and check `J`, bound `Y` and `Z`, search for `r`
/// numerically and confirm it in interval arithmetic.
pub fn prove(seg: &SegmentData, opts: &ProofOptions) -> Result<ProofOutcome, ContractionError> {
    let (polys, margin) = radii_polynomials(seg, opts)?;
    let (lo, hi) = match find_r(&polys) {
        RSearch::Found { lo, hi } => (lo, hi),
        RSearch::Empty(rep) => return Err(ContractionError::NoRadius(rep)),
    };
    let mut tries = Vec::new();
    if let Some(t) = opts.target_r {
        if t > lo && t < hi {
            tries.push(t);
        }
    }
    tries.extend(radii::candidates(lo, hi));
    let mut last = None;
    for r in tries {
        match rigorous_verify(&polys, r, (lo, hi)) {
            Ok(radius) => {
                return Ok(ProofOutcome {
                    radius,
                    polys,
                    injectivity_margin: margin,
                })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(ContractionError::VerificationFailed {
        r: f64::NAN,
        indices: vec![],
    }))
}
