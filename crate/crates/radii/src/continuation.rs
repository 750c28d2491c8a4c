//! Pseudo-arclength continuation of the Galerkin projection, with the
//! adaptive choice of step size and projection size driven by which radii
//! polynomials fail.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::contraction::{
    ContractionError, EstimateSettings, IndexKind, ProofOptions, ProofOutcome, SegmentData,
};
use crate::estimates::{alpha, EstimateParams};
use crate::interval::Interval;
use crate::mimura::{Model, ModelError, ModelParams};
use crate::seqspace::{norm_q, CosinePoint, SeqError, SpaceParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuationError {
    #[error("Newton did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("kernel of the Jacobian is not one-dimensional (σ ratio {ratio:e})")]
    KernelDimensionAmbiguous { ratio: f64 },
    #[error("no verified step after {attempts} attempts")]
    StepBudgetExceeded { attempts: usize, log: AttemptLog },
    #[error("projection size {m} exceeds the cap {cap}")]
    ProjectionTooLarge { m: usize, cap: usize },
    #[error(transparent)]
    Proof(#[from] ContractionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationConfig {
    pub ds0: f64,
    pub m0: usize,
    pub q: f64,
    pub rho: f64,
    pub ds_up_factor: f64,
    pub ds_down_factor: f64,
    pub m_up_factor: f64,
    /// Bound on the ∞-norm of `f` for the corrector.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// `Δs` grows after a success only if `max I ≥ factor · r`.
    pub r_threshold_ds: f64,
    /// `m` shrinks only if the smaller `m` still suffices at `d / factor`.
    pub d_threshold_m: f64,
    /// Two singular values below `ratio · σ_max` mean an ambiguous kernel.
    pub kernel_ratio: f64,
    pub max_retries: usize,
    pub m_max: usize,
    pub ds_min: f64,
    pub params: ModelParams,
    pub estimates: EstimateSettings,
    pub proof: ProofOptions,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            ds0: 1e-3,
            m0: 25,
            q: 2.0,
            rho: 10.0,
            ds_up_factor: 10.0 / 9.0,
            ds_down_factor: 9.0 / 10.0,
            m_up_factor: 1.02,
            newton_tol: 1e-12,
            newton_max_iter: 20,
            r_threshold_ds: 4.0,
            d_threshold_m: 1.5,
            kernel_ratio: 1e-10,
            max_retries: 30,
            m_max: 400,
            ds_min: 1e-12,
            params: ModelParams::default(),
            estimates: EstimateSettings::default(),
            proof: ProofOptions::default(),
        }
    }
}

impl ContinuationConfig {
    pub fn space(&self) -> Result<SpaceParams, SeqError> {
        SpaceParams::new(self.q, self.rho)
    }

    fn grow_m(&self, m: usize) -> usize {
        ((m as f64 * self.m_up_factor).floor() as usize).max(m + 1)
    }

    fn shrink_m(&self, m: usize) -> usize {
        ((m as f64 / self.m_up_factor).floor() as usize).min(m.saturating_sub(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationState {
    pub current: CosinePoint<f64>,
    pub tangent: CosinePoint<f64>,
    pub ds: f64,
    pub m: usize,
    pub step_index: usize,
    /// Projection size the next segment must hand over to.
    pub pending_m: Option<usize>,
}

impl ContinuationState {
    /// A state at `u` with its kernel tangent oriented towards decreasing or
    /// increasing `d` according to `direction`'s sign.
    pub fn start(
        u: CosinePoint<f64>,
        direction: f64,
        cfg: &ContinuationConfig,
    ) -> Result<Self, ContinuationError> {
        let m = u.m();
        let mut t = tangent_at(&u, None, cfg)?;
        if t.d * direction < 0.0 {
            t = t.scale(-1.0);
        }
        Ok(ContinuationState {
            current: u,
            tangent: t,
            ds: cfg.ds0,
            m,
            step_index: 0,
            pending_m: None,
        })
    }
}

/// Unit kernel vector of the `3m × (3m+1)` Jacobian, oriented along
/// `prev` (or towards `d ≥ 0` without one).
pub fn tangent_at(
    u: &CosinePoint<f64>,
    prev: Option<&CosinePoint<f64>>,
    cfg: &ContinuationConfig,
) -> Result<CosinePoint<f64>, ContinuationError> {
    let model = Model::<f64>::new(&cfg.params)?;
    let df = model.df_matrix(u);
    let n = df.ncols();
    let mut sq = DMatrix::<f64>::zeros(n, n);
    sq.view_mut((0, 0), (n - 1, n)).copy_from(&df);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smax = svd.singular_values[order[n - 1]];
    let second = svd.singular_values[order[1]];
    if second <= cfg.kernel_ratio * smax {
        return Err(ContinuationError::KernelDimensionAmbiguous {
            ratio: second / smax,
        });
    }
    let v: Vec<f64> = vt.row(order[0]).iter().copied().collect();
    let mut t = CosinePoint::from_flat(&v)?;
    let flip = match prev {
        Some(p) => t.dot(&p.resize(t.m())) < 0.0,
        None => t.d < 0.0,
    };
    if flip {
        t = t.scale(-1.0);
    }
    Ok(t)
}

/// `Û = Ū + Δs U̇`.
pub fn predict(state: &ContinuationState) -> CosinePoint<f64> {
    state.current.add_scaled(&state.tangent.resize(state.current.m()), state.ds)
}

/// Newton's method on `((U − Û)·U̇ ; f(U)) = 0`.  The LU factors of the
/// bordered Jacobian are kept while the residual falls by at least a factor
/// of ten per iteration and rebuilt otherwise.
pub fn correct(
    pred: &CosinePoint<f64>,
    tangent: &CosinePoint<f64>,
    cfg: &ContinuationConfig,
) -> Result<CosinePoint<f64>, ContinuationError> {
    let model = Model::<f64>::new(&cfg.params)?;
    let t = tangent.resize(pred.m());
    let tflat = DVector::from_vec(t.to_flat());
    let base = DVector::from_vec(pred.to_flat());
    let residual = |u: &DVector<f64>| -> Result<(DVector<f64>, f64, f64), ContinuationError> {
        let p = CosinePoint::from_flat(u.as_slice())?;
        let f = model.f_flat(&p);
        let e = (u - &base).dot(&tflat);
        let norm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut g = Vec::with_capacity(f.len() + 1);
        g.push(e);
        g.extend(f);
        Ok((DVector::from_vec(g), norm, e.abs()))
    };
    let jacobian = |u: &DVector<f64>| -> Result<_, ContinuationError> {
        let p = CosinePoint::from_flat(u.as_slice())?;
        let n = u.len();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        jac.row_mut(0).copy_from(&tflat.transpose());
        jac.view_mut((1, 0), (n - 1, n)).copy_from(&model.df_matrix(&p));
        Ok(jac.lu())
    };
    let mut u = base.clone();
    let (mut g, mut res, mut e) = residual(&u)?;
    let mut lu = None;
    let mut rises = 0;
    let mut it = 0;
    while it <= cfg.newton_max_iter {
        if res < cfg.newton_tol && e < cfg.newton_tol * (1.0 + u.norm()) {
            return Ok(CosinePoint::from_flat(u.as_slice())?);
        }
        if it == cfg.newton_max_iter {
            break;
        }
        let (factors, fresh) = match lu.take() {
            Some(f) => (f, false),
            None => (jacobian(&u)?, true),
        };
        let step = factors.solve(&g).ok_or(ContinuationError::NewtonDiverged {
            iterations: it,
            residual: res,
        })?;
        let next = &u - step;
        let (g2, res2, e2) = residual(&next)?;
        if res2.is_finite() && res2 < 0.1 * res {
            lu = Some(factors);
        } else if !fresh {
            continue;
        } else {
            if !res2.is_finite() {
                return Err(ContinuationError::NewtonDiverged {
                    iterations: it + 1,
                    residual: res2,
                });
            }
            rises = if res2 >= res { rises + 1 } else { 0 };
            if rises >= 3 {
                return Err(ContinuationError::NewtonDiverged {
                    iterations: it + 1,
                    residual: res2,
                });
            }
        }
        u = next;
        g = g2;
        res = res2;
        e = e2;
        it += 1;
    }
    Err(ContinuationError::NewtonDiverged {
        iterations: cfg.newton_max_iter,
        residual: res,
    })
}

/// What one attempt of [`adaptive_step`] did.
#[derive(Debug, Clone, PartialEq)]
pub enum AttemptOutcome {
    Verified { r: f64 },
    ShrinkDs { reason: String },
    GrowM { to: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttemptEvent {
    pub step: usize,
    pub attempt: usize,
    pub ds: f64,
    pub m: usize,
    pub outcome: AttemptOutcome,
}

pub type AttemptLog = Vec<AttemptEvent>;

/// A verified segment and the state to continue from.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub state: ContinuationState,
    pub segment: SegmentData,
    pub outcome: ProofOutcome,
    pub log: AttemptLog,
}

enum Verdict {
    Shrink(String),
    Grow(usize, String),
}

fn classify(
    err: &ContractionError,
    m: usize,
    u: &CosinePoint<f64>,
    cfg: &ContinuationConfig,
) -> Option<Verdict> {
    // `m` grows by the configured factor, but never to less than the cheap
    // tail indicator asks for.
    let grown = || {
        let floor = required_m(u, cfg.q, u.d, cfg).unwrap_or(0);
        cfg.grow_m(m).max(floor)
    };
    match err {
        ContractionError::NoRadius(rep) => {
            let kinds: Vec<IndexKind> = rep
                .empty
                .iter()
                .map(|&j| kind_of(j, rep.m, rep.big_m))
                .collect();
            let low = kinds
                .iter()
                .any(|k| matches!(k, IndexKind::D | IndexKind::Block { .. }));
            let high = kinds
                .iter()
                .any(|k| matches!(k, IndexKind::Middle { .. } | IndexKind::Tail { .. }));
            if low {
                Some(Verdict::Shrink(format!("empty I_n below m ({err})")))
            } else if high {
                Some(Verdict::Grow(grown(), format!("empty I_n at or above m ({err})")))
            } else {
                Some(Verdict::Shrink(format!("I empty ({err})")))
            }
        }
        ContractionError::TailNotMonotone { needed, .. } => {
            let to = grown().max((needed + 2) / 2);
            Some(Verdict::Grow(to, err.to_string()))
        }
        ContractionError::VerificationFailed { .. }
        | ContractionError::InjectivityUnverified { .. }
        | ContractionError::SingularJacobian => Some(Verdict::Shrink(err.to_string())),
        _ => None,
    }
}

fn kind_of(j: usize, m: usize, big_m: usize) -> IndexKind {
    if j == 0 {
        return IndexKind::D;
    }
    let (n, c) = ((j - 1) / 3, (j - 1) % 3);
    if n < m {
        IndexKind::Block { n, c }
    } else if n < big_m {
        IndexKind::Middle { n, c }
    } else {
        IndexKind::Tail { c }
    }
}

/// Sets modes `m_keep..` of a point to exact zeros, keeping its length.
fn zero_above(p: &CosinePoint<f64>, m_keep: usize) -> CosinePoint<f64> {
    let mut out = p.clone();
    for c in 0..3 {
        for v in out.comp_mut(c).coeffs_mut().iter_mut().skip(m_keep) {
            *v = 0.0;
        }
    }
    out
}

/// Predict, correct and prove one segment, adapting `Δs` and `m` until the
/// prover succeeds or the retry budget runs out.
pub fn adaptive_step<P>(
    state: &ContinuationState,
    cfg: &ContinuationConfig,
    mut prove: P,
) -> Result<StepResult, ContinuationError>
where
    P: FnMut(&SegmentData) -> Result<ProofOutcome, ContractionError>,
{
    let space = cfg.space()?;
    let mut ds = state.ds;
    let mut m = state.m;
    let mut pending = state.pending_m;
    let mut log = AttemptLog::new();
    for attempt in 0..cfg.max_retries {
        if m > cfg.m_max {
            return Err(ContinuationError::ProjectionTooLarge { m, cap: cfg.m_max });
        }
        if pending.is_some_and(|p| p >= m) {
            pending = None;
        }
        let event = |outcome| AttemptEvent {
            step: state.step_index,
            attempt,
            ds,
            m,
            outcome,
        };
        let u0 = state.current.resize(m);
        let t0 = state.tangent.resize(m);
        let pred = u0.add_scaled(&t0, ds);
        let corrected = correct(&pred, &t0, cfg).and_then(|u1| {
            let t1 = tangent_at(&u1, Some(&t0), cfg)?;
            Ok((u1, t1))
        });
        let (mut u1, mut t1) = match corrected {
            Ok(v) => v,
            Err(e @ ContinuationError::NewtonDiverged { .. })
            | Err(e @ ContinuationError::KernelDimensionAmbiguous { .. }) => {
                log.push(event(AttemptOutcome::ShrinkDs { reason: e.to_string() }));
                ds *= cfg.ds_down_factor;
                if ds < cfg.ds_min {
                    break;
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        if let Some(keep) = pending {
            u1 = zero_above(&u1, keep);
            t1 = zero_above(&t1, keep);
        }
        let seg = SegmentData::new(u0, u1.clone(), t0, t1.clone(), space, cfg.params, cfg.estimates)?;
        match prove(&seg) {
            Ok(outcome) => {
                let r = outcome.radius.r;
                log.push(event(AttemptOutcome::Verified { r }));
                let next_m = pending.unwrap_or(m);
                let mut next = ContinuationState {
                    current: u1.resize(next_m),
                    tangent: t1.resize(next_m),
                    ds,
                    m: next_m,
                    step_index: state.step_index + 1,
                    pending_m: None,
                };
                if outcome.radius.candidate_interval.1 >= cfg.r_threshold_ds * r {
                    next.ds = ds * cfg.ds_up_factor;
                }
                let smaller = cfg.shrink_m(next_m);
                if pending.is_none() && smaller >= 4 {
                    let d_pess = next.current.d / cfg.d_threshold_m;
                    let need = required_m(&next.current, cfg.q, d_pess, cfg);
                    if need.is_some_and(|need| need <= smaller) {
                        next.pending_m = Some(smaller);
                    }
                }
                return Ok(StepResult {
                    state: next,
                    segment: seg,
                    outcome,
                    log,
                });
            }
            Err(e) => match classify(&e, m, &seg.u0, cfg) {
                Some(Verdict::Shrink(reason)) => {
                    log.push(event(AttemptOutcome::ShrinkDs { reason }));
                    ds *= cfg.ds_down_factor;
                    if ds < cfg.ds_min {
                        break;
                    }
                }
                Some(Verdict::Grow(to, reason)) => {
                    log.push(event(AttemptOutcome::GrowM { to, reason }));
                    m = to;
                    pending = None;
                }
                None => return Err(e.into()),
            },
        }
    }
    Err(ContinuationError::StepBudgetExceeded {
        attempts: log.len(),
        log,
    })
}

/// The dominant part of the tail coefficient `b_M`,
/// `½ α_M ‖u‖_q max_row(|J_M| λ) − 1`, at diffusion `d`; negative values
/// mean `m` is large enough for the tail.
pub fn tail_indicator(
    u: &CosinePoint<f64>,
    q: f64,
    d: f64,
    m: usize,
    cfg: &ContinuationConfig,
) -> Option<f64> {
    let big_m = 2 * m - 1;
    let space = SpaceParams::new(q, cfg.rho).ok()?;
    let ep = EstimateParams {
        q,
        k: cfg.estimates.k_tail,
        big_m,
        k_sharp: cfg.estimates.k_sharp_factor.max(2) * big_m,
        sharper_tail: None,
    };
    let a = alpha(big_m, &ep).ok()?;
    let nu = norm_q(&u.x, &u.y, &u.z, &space);
    let p = cfg.params;
    let pm = (std::f64::consts::PI * big_m as f64).powi(2);
    let (a1, c1, e1) = (p.r1 - d * pm, p.r1 - 1.0 / p.eps - (d + p.beta * p.big_n) * pm, p.r2 - d * pm);
    if a1 >= 0.0 || e1 >= 0.0 || c1 >= 0.0 {
        return Some(f64::INFINITY);
    }
    let model = Model::<Interval>::new(&p).ok()?;
    let lam = model.row_lambdas().map(|l| l.hi());
    let jx = lam[0] / a1.abs() + lam[1] / (p.eps * a1.abs() * c1.abs());
    let jy = lam[1] / c1.abs();
    let jz = lam[2] / e1.abs();
    Some(0.5 * a.hi() * nu.hi() * jx.max(jy).max(jz) - 1.0)
}

/// Smallest `m` whose tail indicator is negative at diffusion `d`, by
/// binary search up to `cfg.m_max`.
pub fn required_m(u: &CosinePoint<f64>, q: f64, d: f64, cfg: &ContinuationConfig) -> Option<usize> {
    let ok = |m: usize| tail_indicator(u, q, d, m, cfg).is_some_and(|v| v < 0.0);
    let (mut lo, mut hi) = (4usize, cfg.m_max);
    if !ok(hi) {
        return None;
    }
    if ok(lo) {
        return Some(lo);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Advisory projection size per candidate decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct QAdvice {
    pub q: f64,
    pub m_required: Option<usize>,
}

pub fn advise_q(sample: &CosinePoint<f64>, candidates: &[f64], cfg: &ContinuationConfig) -> Vec<QAdvice> {
    candidates
        .iter()
        .map(|&q| QAdvice {
            q,
            m_required: if q > 1.0 {
                required_m(sample, q, sample.d, cfg)
            } else {
                None
            },
        })
        .collect()
}

/// Resizes the state to a new projection size.  Growing pads with zeros;
/// shrinking is deferred: the next segment zeroes the dropped modes of its
/// end point before it is proved.
pub fn change_m(state: &ContinuationState, m_new: usize) -> ContinuationState {
    let mut s = state.clone();
    if m_new >= state.m {
        s.current = state.current.resize(m_new);
        s.tangent = state.tangent.resize(m_new);
        s.m = m_new;
        s.pending_m = None;
    } else {
        s.pending_m = Some(m_new);
    }
    s
}
