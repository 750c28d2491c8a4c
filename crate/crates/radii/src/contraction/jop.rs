//! The approximate inverse `J`: a dense float block on the first `m` modes
//! and the exact inverse of the linear part on every higher mode.

use crate::interval::Interval;
use crate::linalg::{matmul_point_iv, norm_inf_iv, Mat};
use crate::mimura::Model;
use crate::scalar::pi_n_sq;

use super::{ContractionError, SegmentData};

/// `J = diag(J^[m], J_m, J_{m+1}, ...)`.
#[derive(Debug, Clone)]
pub struct JOperator {
    /// Numerical inverse of the bordered Jacobian, entries used as points.
    pub jm: Mat<f64>,
    /// `I − J^[m] DF_0^[m](Ū_0)` in interval arithmetic.
    pub defect: Mat<Interval>,
    /// Upper bound of `‖I − J^[m] DF_0^[m]‖_∞`.
    pub injectivity_margin: Interval,
    /// The diffusion at which every `J_n`, `n ≥ m`, is built.
    pub d0: f64,
    model: Model<Interval>,
}

impl JOperator {
    /// The tail block `J_n` (any `n`), an enclosure of
    /// ```text
    /// ⎡ 1/a  −1/(ε a c)  0  ⎤     a = r1 − d(πn)²
    /// ⎢  0      1/c      0  ⎥     c = r1 − 1/ε − (d + βN)(πn)²
    /// ⎣  0       0      1/e ⎦     e = r2 − d(πn)²
    /// ```
    pub fn j_tail(&self, n: usize) -> Result<[[Interval; 3]; 3], ContractionError> {
        j_block(&self.model, Interval::point(self.d0), n)
    }

    /// `|J_n|` entrywise upper bounds.
    pub fn abs_tail(&self, n: usize) -> Result<[[Interval; 3]; 3], ContractionError> {
        Ok(self.j_tail(n)?.map(|row| row.map(|v| v.mag_iv())))
    }

    pub fn dim(&self) -> usize {
        self.jm.rows()
    }
}

fn j_block(model: &Model<Interval>, d: Interval, n: usize) -> Result<[[Interval; 3]; 3], ContractionError> {
    let lin = model.linear(d, n);
    let (a, b, c, e) = (lin[0][0], lin[0][1], lin[1][1], lin[2][2]);
    let bad = |_| ContractionError::InjectivityUnverified {
        reason: format!("linear block of mode {n} is not provably invertible"),
    };
    let ia = a.recip().map_err(bad)?;
    let ic = c.recip().map_err(bad)?;
    let ie = e.recip().map_err(bad)?;
    let z = Interval::ZERO;
    Ok([[ia, -(b * ia * ic), z], [z, ic, z], [z, z, ie]])
}

/// The bordered Jacobian `(U̇_0 ; ∂f/∂d | D_u f)` at `Ū_0`, in the arithmetic
/// of the given model.
pub(crate) fn bordered<T: crate::scalar::Scalar>(
    model: &Model<T>,
    u0: &crate::seqspace::CosinePoint<T>,
    tangent: &[T],
) -> Mat<T> {
    let rows = model.df_rows(u0);
    let dim = rows.cols();
    Mat::from_fn(dim, dim, |i, j| if i == 0 { tangent[j] } else { rows.get(i - 1, j) })
}

/// Inverts the bordered Jacobian at `Ū_0` in floats.
pub fn build_j(seg: &SegmentData) -> Result<JOperator, ContractionError> {
    let fmodel = Model::<f64>::new(&seg.params)?;
    let tflat = seg.t0.to_flat();
    let b = bordered(&fmodel, &seg.u0, &tflat).to_dmatrix();
    let inv = b
        .clone()
        .try_inverse()
        .ok_or(ContractionError::SingularJacobian)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(ContractionError::SingularJacobian);
    }
    let jm = Mat::from_dmatrix(&inv);

    let model = Model::<Interval>::new(&seg.params)?;
    let u0 = seg.u0.to_interval();
    let tiv: Vec<Interval> = tflat.iter().map(|&v| Interval::point(v)).collect();
    let df0 = bordered(&model, &u0, &tiv);
    let prod = matmul_point_iv(&jm, &df0);
    let dim = prod.rows();
    let defect = Mat::from_fn(dim, dim, |i, j| {
        let id = if i == j { Interval::ONE } else { Interval::ZERO };
        id - prod.get(i, j)
    });
    let injectivity_margin = norm_inf_iv(&defect);
    if !injectivity_margin.hi().is_finite() {
        return Err(ContractionError::SingularJacobian);
    }
    Ok(JOperator {
        jm,
        defect,
        injectivity_margin,
        d0: seg.u0.d,
        model,
    })
}

/// A 3×3 block of enclosures.
pub(crate) type Block3 = [[Interval; 3]; 3];

/// Longest run of tail modes scanned for a sign change.
const MAX_TAIL_SCAN: usize = 10_000_000;

/// Proves that `J` is injective: the finite block through the defect norm,
/// the tail blocks by showing their diagonal entries avoid zero for every
/// `n ≥ m` and every `d` between the segment endpoints.
pub fn verify_j_injective(j: &JOperator, seg: &SegmentData) -> Result<Interval, ContractionError> {
    if !(j.injectivity_margin.hi() < 1.0) {
        return Err(ContractionError::InjectivityUnverified {
            reason: format!("‖I − J DF‖ ≤ {:.3e} is not below one", j.injectivity_margin.hi()),
        });
    }
    let d = seg.d_hull();
    if !(d.lo() > 0.0) {
        return Err(ContractionError::InjectivityUnverified {
            reason: "the diffusion is not provably positive".into(),
        });
    }
    let c = &j.model.c;
    if !(d + c.beta_n).strictly_positive() {
        return Err(ContractionError::InjectivityUnverified {
            reason: "d + βN is not provably positive".into(),
        });
    }
    // Past this mode all three entries are negative for the smallest d.
    let p = &seg.params;
    let top = p.r1.max(p.r2).max(p.r1 - 1.0 / p.eps).max(0.0);
    let last = (top / (std::f64::consts::PI.powi(2) * d.lo())).sqrt().ceil() + 2.0;
    if !(last < (seg.m + MAX_TAIL_SCAN) as f64) {
        return Err(ContractionError::InjectivityUnverified {
            reason: format!("d ≥ {:e} is too small to scan the tail of J", d.lo()),
        });
    }
    for n in seg.m..=(last as usize).max(seg.m) {
        let pn: Interval = pi_n_sq(n);
        let a = c.r1 - d * pn;
        let cc = c.r1 - c.inv_eps - (d + c.beta_n) * pn;
        let e = c.r2 - d * pn;
        if a.strictly_negative() && cc.strictly_negative() && e.strictly_negative() {
            // All three only decrease from here on.
            return Ok(j.injectivity_margin);
        }
        if !(a.strictly_positive() || a.strictly_negative())
            || !(cc.strictly_positive() || cc.strictly_negative())
            || !(e.strictly_positive() || e.strictly_negative())
        {
            return Err(ContractionError::InjectivityUnverified {
                reason: format!("a diagonal entry of J_{n} may vanish"),
            });
        }
    }
    Err(ContractionError::InjectivityUnverified {
        reason: "the tail diagonal of J could not be signed".into(),
    })
}

/// Entrywise upper bounds `A ≥ |J_n|` and `B ≥ (πn)²|J_n|` valid for every
/// `n ≥ M`.  Needs `d(πM)² > max(r1, r2)` and `(d + βN)(πM)² > r1 − 1/ε`
/// over the whole segment.
pub(crate) fn tail_sup(
    j: &JOperator,
    seg: &SegmentData,
) -> Result<(Block3, Block3), ContractionError> {
    let big_m = seg.big_m();
    let c = &j.model.c;
    let p: Interval = pi_n_sq(big_m);
    for d in [seg.d_hull(), Interval::point(j.d0)] {
        let a = c.r1 - d * p;
        let e = c.r2 - d * p;
        let cc = c.r1 - c.inv_eps - (d + c.beta_n) * p;
        if !(a.strictly_negative() && e.strictly_negative() && cc.strictly_negative()) {
            let dl = d.lo().max(f64::MIN_POSITIVE);
            let need = (seg.params.r1.max(seg.params.r2) / (std::f64::consts::PI.powi(2) * dl)).sqrt();
            return Err(ContractionError::TailNotMonotone {
                big_m,
                needed: need.ceil() as usize + 1,
            });
        }
    }
    let abs = j.abs_tail(big_m)?;
    let mut scaled = abs.map(|row| row.map(|v| p * v));
    // (πn)²/|c_n| increases towards 1/(d + βN) when 1/ε > r1.
    let lim = (Interval::point(j.d0) + c.beta_n).recip()?;
    scaled[1][1] = scaled[1][1].max(lim);
    Ok((abs, scaled))
}

/// Applies a 3×3 block of upper bounds to a vector of upper bounds.
pub(crate) fn abs3(m: &[[Interval; 3]; 3], v: [Interval; 3]) -> [Interval; 3] {
    m.map(|row| row[0].mag_iv() * v[0].mag_iv() + row[1].mag_iv() * v[1].mag_iv() + row[2].mag_iv() * v[2].mag_iv())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimura::ModelParams;

    #[test]
    fn tail_block_entries() {
        let p = ModelParams::default();
        let model = Model::<Interval>::new(&p).unwrap();
        let d = 0.01;
        let n = 20;
        let blk = j_block(&model, Interval::point(d), n).unwrap();
        let pn = (std::f64::consts::PI * n as f64).powi(2);
        let a = 5.0 - d * pn;
        let c = 5.0 - 100.0 - (d + 3.0) * pn;
        assert!((blk[0][0].mid() - 1.0 / a).abs() < 1e-15);
        assert!((blk[0][1].mid() + 1.0 / (0.01 * a * c)).abs() < 1e-13);
        assert!((blk[2][2].mid() - 1.0 / (2.0 - d * pn)).abs() < 1e-15);
    }
}
