//! Global statements assembled from verified segments: smoothness of each
//! tube, gluing of consecutive tubes, the error on `z(0)` and the count of
//! solutions crossing a fixed diffusion value.

use thiserror::Error;

use crate::contraction::{
    prove, radii_polynomials, rigorous_verify, ContractionError, EstimateSettings, ProofOptions,
    ProofOutcome, SegmentData,
};
use crate::estimates::{zeta_parts, EstimateError};
use crate::interval::Interval;
use crate::mimura::ModelParams;
use crate::seqspace::{weight, z_at_zero_iv, CosinePoint, SpaceParams};

/// Truncation used for `Σ 1/n^q` in the `z(0)` error.
pub const Z0_ERROR_TERMS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("smoothness not verified: left side encloses [{lo:e}, {hi:e}]")]
    SmoothnessUnverified { lo: f64, hi: f64 },
    #[error("record is not radii-verified")]
    NotVerified,
    #[error("crossing of d = {d_star} is ambiguous in certificate {cert}, run starting at segment {run_start}")]
    AmbiguousCrossing {
        cert: usize,
        run_start: usize,
        d_star: f64,
    },
    #[error("witnesses {pairs:?} have overlapping z(0) intervals")]
    OverlappingWitnesses {
        report: CoexistenceReport,
        pairs: Vec<(usize, usize)>,
    },
    #[error(transparent)]
    Proof(#[from] ContractionError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RecordFlags {
    pub j_injective: bool,
    pub radii_verified: bool,
    pub smooth_verified: bool,
}

/// One certified tube.
#[derive(Debug, Clone)]
pub struct SegmentRecord {
    pub seg: SegmentData,
    pub r: f64,
    pub kappa_hi: f64,
    pub smooth_ok: bool,
    pub flags: RecordFlags,
}

impl SegmentRecord {
    /// A record built from a successful proof; smoothness is checked here.
    pub fn from_proof(seg: SegmentData, outcome: &ProofOutcome) -> Self {
        let mut rec = SegmentRecord {
            seg,
            r: outcome.radius.r,
            kappa_hi: outcome.radius.kappa_bound.hi(),
            smooth_ok: false,
            flags: RecordFlags {
                j_injective: true,
                radii_verified: true,
                smooth_verified: false,
            },
        };
        let ok = check_smooth(&rec).is_ok();
        rec.smooth_ok = ok;
        rec.flags.smooth_verified = ok;
        rec
    }

    /// Recomputes every rigorous check from the stored segment and radius.
    /// Flags that fail come back cleared; the first failure is returned
    /// alongside.
    pub fn reverify(seg: SegmentData, r: f64, opts: &ProofOptions) -> (Self, Option<CertifyError>) {
        let mut rec = SegmentRecord {
            seg,
            r,
            kappa_hi: f64::INFINITY,
            smooth_ok: false,
            flags: RecordFlags::default(),
        };
        let (polys, _) = match radii_polynomials(&rec.seg, opts) {
            Ok(v) => v,
            Err(e) => return (rec, Some(e.into())),
        };
        rec.flags.j_injective = true;
        match rigorous_verify(&polys, r, (r, r)) {
            Ok(v) => {
                rec.kappa_hi = v.kappa_bound.hi();
                rec.flags.radii_verified = true;
            }
            Err(e) => return (rec, Some(e.into())),
        }
        match check_smooth(&rec) {
            Ok(_) => {
                rec.smooth_ok = true;
                rec.flags.smooth_verified = true;
                (rec, None)
            }
            Err(e) => (rec, Some(e)),
        }
    }

    pub fn d_range(&self) -> (f64, f64) {
        (self.seg.u0.d, self.seg.u1.d)
    }
}

/// `−ΔŪ·U̇₀ + r W₁·|ΔU̇| + |ΔŪ·ΔU̇|` over the finite block, with
/// `W₁ = (1/ρ, 1/ω_0 ×3, …, 1/ω_{m−1} ×3)`.
pub fn smooth_lhs(seg: &SegmentData, r: f64) -> Interval {
    let du = seg.delta_u().to_flat();
    let dt = seg.delta_t().to_flat();
    let t0 = seg.t0.to_interval().to_flat();
    let q = seg.space.q();
    let w1 = |j: usize| -> Interval {
        if j == 0 {
            seg.space.rho_iv().recip().expect("ρ > 0")
        } else {
            weight((j - 1) / 3, q).recip().expect("ω_n ≥ 1")
        }
    };
    let mut along = Interval::ZERO;
    let mut spread = Interval::ZERO;
    let mut cross = Interval::ZERO;
    for j in 0..du.len() {
        along += du[j] * t0[j];
        spread += w1(j) * dt[j].mag_iv();
        cross += du[j] * dt[j];
    }
    -along + Interval::point(r) * spread + cross.mag_iv()
}

/// Smoothness of the tube: succeeds iff the left side is provably negative.
pub fn check_smooth(rec: &SegmentRecord) -> Result<Interval, CertifyError> {
    if !rec.flags.radii_verified {
        return Err(CertifyError::NotVerified);
    }
    let v = smooth_lhs(&rec.seg, rec.r);
    if v.strictly_negative() {
        Ok(v)
    } else {
        Err(CertifyError::SmoothnessUnverified { lo: v.lo(), hi: v.hi() })
    }
}

/// Consecutive tubes glue into one smooth curve when they share endpoint and
/// tangent bit for bit and both are fully verified.
pub fn check_glue(a: &SegmentRecord, b: &SegmentRecord) -> bool {
    a.seg.u1.bit_eq_padded(&b.seg.u0)
        && a.seg.t1.bit_eq_padded(&b.seg.t0)
        && fully_verified(a)
        && fully_verified(b)
}

fn fully_verified(r: &SegmentRecord) -> bool {
    r.flags.radii_verified && r.flags.smooth_verified
}

/// The kernel of `Df` stays one-dimensional along the tube.
pub fn regular_path_flag(rec: &SegmentRecord) -> bool {
    rec.flags.radii_verified && rec.kappa_hi < 1.0 && rec.flags.smooth_verified
}

/// `r (½ + Σ_{n≥1} 1/n^q)`: how far `z(0)` of any point in a ball of radius
/// `r` can be from the centre's.
pub fn z0_error(r: f64, q: f64) -> Result<Interval, EstimateError> {
    if !(q > 1.0) {
        return Err(EstimateError::DomainError(q, "z0_error needs q > 1"));
    }
    let (s, tail) = zeta_parts(q, Z0_ERROR_TERMS)?;
    Ok(Interval::point(r) * (Interval::point(0.5) + s + tail))
}

/// Run-level bookkeeping of a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertMeta {
    pub params: ModelParams,
    pub created: String,
    pub code_version: String,
}

#[derive(Debug, Clone)]
pub struct BranchCertificate {
    pub segments: Vec<SegmentRecord>,
    pub glue_ok: Vec<bool>,
    pub meta: CertMeta,
}

impl BranchCertificate {
    pub fn assemble(segments: Vec<SegmentRecord>, meta: CertMeta) -> Self {
        let glue_ok = segments.windows(2).map(|w| check_glue(&w[0], &w[1])).collect();
        BranchCertificate {
            segments,
            glue_ok,
            meta,
        }
    }

    /// Maximal index ranges `[a, b)` of fully verified, pairwise glued
    /// segments.
    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, rec) in self.segments.iter().enumerate() {
            if !fully_verified(rec) {
                if let Some(a) = start.take() {
                    out.push((a, i));
                }
                continue;
            }
            match start {
                None => start = Some(i),
                Some(a) if i > 0 && !self.glue_ok[i - 1] => {
                    out.push((a, i));
                    start = Some(i);
                }
                _ => {}
            }
        }
        if let Some(a) = start {
            out.push((a, self.segments.len()));
        }
        out
    }
}

/// A solution proved to exist at `d = d_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub cert: usize,
    /// Segments `first..=last` whose union contains the crossing.
    pub first: usize,
    pub last: usize,
    pub z0: Interval,
    pub eps_r: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoexistenceReport {
    pub d_star: f64,
    pub count: usize,
    pub witnesses: Vec<Witness>,
    pub max_eps_r: f64,
}

/// Side of `d_star` a junction point is provably on: `+1`, `−1` or `0`.
fn side(d: f64, r: f64, rho: f64, d_star: f64) -> i8 {
    let band = Interval::point(r).try_div(Interval::point(rho)).expect("ρ > 0");
    let lo = Interval::point(d) - band;
    let hi = Interval::point(d) + band;
    if lo.lo() > d_star {
        1
    } else if hi.hi() < d_star {
        -1
    } else {
        0
    }
}

/// Counts solution-curve crossings of `d = d_star` in glued runs and checks
/// the witnesses are distinct through their `z(0)` enclosures.
pub fn coexistence_count(
    certs: &[BranchCertificate],
    d_star: f64,
) -> Result<CoexistenceReport, CertifyError> {
    let mut witnesses = Vec::new();
    for (ci, cert) in certs.iter().enumerate() {
        for (a, b) in cert.runs() {
            let segs = &cert.segments[a..b];
            // Junction points 0..=len with the radius of the tightest
            // adjacent tube.
            let mut points = Vec::with_capacity(segs.len() + 1);
            for (k, s) in segs.iter().enumerate() {
                let r = if k == 0 { s.r } else { s.r.min(segs[k - 1].r) };
                points.push((s.seg.u0.d, r, s.seg.space.rho()));
            }
            let last = segs.last().expect("runs are nonempty");
            points.push((last.seg.u1.d, last.r, last.seg.space.rho()));
            let sides: Vec<i8> = points.iter().map(|&(d, r, rho)| side(d, r, rho, d_star)).collect();

            let mut prev: Option<usize> = None;
            let mut ambiguous_since: Option<usize> = None;
            for (k, &s) in sides.iter().enumerate() {
                if s == 0 {
                    ambiguous_since.get_or_insert(k);
                    continue;
                }
                if let Some(p) = prev {
                    if sides[p] != s {
                        witnesses.push(witness(ci, a, &segs[p..k], p)?);
                    } else if ambiguous_since.is_some() {
                        return Err(CertifyError::AmbiguousCrossing {
                            cert: ci,
                            run_start: a,
                            d_star,
                        });
                    }
                } else if ambiguous_since.is_some() {
                    return Err(CertifyError::AmbiguousCrossing {
                        cert: ci,
                        run_start: a,
                        d_star,
                    });
                }
                prev = Some(k);
                ambiguous_since = None;
            }
            if ambiguous_since.is_some() {
                return Err(CertifyError::AmbiguousCrossing {
                    cert: ci,
                    run_start: a,
                    d_star,
                });
            }
        }
    }
    let max_eps_r = witnesses.iter().map(|w| w.eps_r.hi()).fold(0.0, f64::max);
    let mut pairs = Vec::new();
    for i in 0..witnesses.len() {
        for j in i + 1..witnesses.len() {
            if witnesses[i].z0.intersect(witnesses[j].z0).is_some() {
                pairs.push((i, j));
            }
        }
    }
    let report = CoexistenceReport {
        d_star,
        count: witnesses.len(),
        witnesses,
        max_eps_r,
    };
    if pairs.is_empty() {
        Ok(report)
    } else {
        Err(CertifyError::OverlappingWitnesses { report, pairs })
    }
}

fn witness(cert: usize, offset: usize, segs: &[SegmentRecord], first: usize) -> Result<Witness, CertifyError> {
    let mut z0: Option<Interval> = None;
    let mut eps = Interval::ZERO;
    for s in segs {
        let e = z0_error(s.r, s.seg.space.q())?;
        eps = eps.max(e);
        let z = z_at_zero_iv(&s.seg.u0).hull(z_at_zero_iv(&s.seg.u1));
        let widened = z + Interval::new(-e.hi(), e.hi()).expect("ordered");
        z0 = Some(match z0 {
            Some(acc) => acc.hull(widened),
            None => widened,
        });
    }
    Ok(Witness {
        cert,
        first: offset + first,
        last: offset + first + segs.len() - 1,
        z0: z0.expect("nonempty bracket"),
        eps_r: eps,
    })
}

/// Settings for a single-point proof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConfig {
    pub space: SpaceParams,
    pub params: ModelParams,
    pub estimates: EstimateSettings,
    pub target_r: Option<f64>,
}

/// Proves a unique zero in a ball around `u` at its fixed `d`, through the
/// zero-length segment with tangent `e_d`.
pub fn prove_point(u: &CosinePoint<f64>, cfg: &PointConfig) -> Result<SegmentRecord, CertifyError> {
    let mut t = CosinePoint::zeros(u.m());
    t.d = 1.0;
    let seg = SegmentData::point(u.clone(), t, cfg.space, cfg.params, cfg.estimates)?;
    let opts = ProofOptions {
        target_r: cfg.target_r,
        ..ProofOptions::default()
    };
    let outcome = prove(&seg, &opts)?;
    Ok(SegmentRecord::from_proof(seg, &outcome))
}
