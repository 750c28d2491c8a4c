//! The defect bound `Y` and the derivative bound `Z`.

use rayon::prelude::*;

use crate::estimates::AlphaTable;
use crate::interval::Interval;
use crate::linalg::{abs_iv_matvec, abs_matvec, matvec_point_iv};
use crate::mimura::Model;
use crate::scalar::pi_n_sq;
use crate::seqspace::{conv_by, norm_q, CosinePoint};

use super::jop::{abs3, tail_sup, JOperator};
use super::{ContractionError, SegmentData};

type Row3 = [Interval; 3];

/// Defect bounds, one per polynomial index.
#[derive(Debug, Clone)]
pub struct YBounds {
    /// Triangle-inequality bound `|J|(|g₀| + |g₁| + ½|g₂|)`.
    pub plain: Vec<Interval>,
    /// Apex-aware bound of `|J g₀ + s J g₁ + ½ s² J g₂|` on the finite
    /// block; copies of `plain` elsewhere.
    pub sharp: Vec<Interval>,
}

impl YBounds {
    /// Entrywise minimum of the two valid bounds.
    pub fn combined(&self) -> Vec<Interval> {
        self.plain
            .iter()
            .zip(&self.sharp)
            .map(|(p, s)| if s.hi() < p.hi() { *s } else { *p })
            .collect()
    }
}

/// Linear and quadratic coefficients (in `r`) of `Z` at `s = 1`.
#[derive(Debug, Clone)]
pub struct ZBounds {
    pub lin: Vec<Interval>,
    pub quad: Vec<Interval>,
}

/// `sup_{s∈[0,1]} |α s² + β s + γ|`: the larger endpoint value, or the apex
/// value too when the apex `−β/(2α)` may lie in `[0, 1]`.
pub fn sharper_s_bound(alpha: Interval, beta: Interval, gamma: Interval) -> Interval {
    let ends = gamma.mag_iv().max((alpha + beta + gamma).mag_iv());
    if alpha.contains_zero() {
        // Apex location unbounded; fall back to the triangle inequality.
        return alpha.mag_iv() + beta.mag_iv() + gamma.mag_iv();
    }
    let two_a = alpha + alpha;
    let apex = -beta.try_div(two_a).expect("alpha is nonzero");
    if apex.hi() < 0.0 || apex.lo() > 1.0 {
        return ends;
    }
    let four_a = two_a + two_a;
    let top = gamma - beta.square().try_div(four_a).expect("alpha is nonzero");
    ends.max(top.mag_iv())
}

fn mag3(v: [Interval; 3]) -> [Interval; 3] {
    v.map(|x| x.mag_iv())
}

/// Taylor pieces of `f_n(Ū_s) = g₀ + s g₁ + ½ s² g₂`.
fn taylor_pieces(
    model: &Model<Interval>,
    u0: &CosinePoint<Interval>,
    du: &CosinePoint<Interval>,
    n: usize,
) -> [[Interval; 3]; 3] {
    [
        model.f_n(u0, n).as_array(),
        model.df_apply(u0, du, n).as_array(),
        model.d2f_apply(u0, du, du, n).as_array(),
    ]
}

/// `Y_d`, `Y_n` for `n < M` and `Y_M = 0`.
pub fn compute_y(seg: &SegmentData, j: &JOperator) -> Result<YBounds, ContractionError> {
    let model = Model::<Interval>::new(&seg.params)?;
    let u0 = seg.u0.to_interval();
    let du = seg.delta_u();
    let (m, big_m, dim) = (seg.m, seg.big_m(), seg.dim());
    let pieces: Vec<[[Interval; 3]; 3]> = (0..big_m)
        .into_par_iter()
        .map(|n| taylor_pieces(&model, &u0, &du, n))
        .collect();
    let half = |v: Interval| v.half();

    let mut g = [vec![Interval::ZERO; dim], vec![Interval::ZERO; dim], vec![Interval::ZERO; dim]];
    let mut tri = vec![Interval::ZERO; dim];
    for n in 0..m {
        for c in 0..3 {
            let i = 1 + 3 * n + c;
            g[0][i] = pieces[n][0][c];
            g[1][i] = pieces[n][1][c];
            g[2][i] = half(pieces[n][2][c]);
            tri[i] = g[0][i].mag_iv() + g[1][i].mag_iv() + g[2][i].mag_iv();
        }
    }
    let plain_block = abs_matvec(&j.jm, &tri);
    let jg: Vec<Vec<Interval>> = g.iter().map(|v| matvec_point_iv(&j.jm, v)).collect();
    let sharp_block: Vec<Interval> = (0..dim)
        .map(|i| sharper_s_bound(jg[2][i], jg[1][i], jg[0][i]))
        .collect();

    let total = seg.n_polys();
    let mut plain = vec![Interval::ZERO; total];
    let mut sharp = vec![Interval::ZERO; total];
    plain[..dim].copy_from_slice(&plain_block);
    sharp[..dim].copy_from_slice(&sharp_block);
    for n in m..big_m {
        let jn = j.abs_tail(n)?;
        let [g0, g1, g2] = pieces[n];
        let s: [Interval; 3] = [0, 1, 2].map(|c| g0[c].mag_iv() + g1[c].mag_iv() + half(g2[c]).mag_iv());
        let y = abs3(&jn, mag3(s));
        for c in 0..3 {
            plain[1 + 3 * n + c] = y[c];
            sharp[1 + 3 * n + c] = y[c];
        }
    }
    Ok(YBounds { plain, sharp })
}

/// `θ_row(u)_k = Σ_comp θ[row][comp] |u_comp,k|`.
fn theta_seq(th: &[[Interval; 3]; 3], u: &CosinePoint<Interval>) -> [Vec<Interval>; 3] {
    let m = u.m();
    [0, 1, 2].map(|row| {
        (0..m)
            .map(|k| {
                let uk = u.u(k);
                th[row][0] * uk[0].mag_iv() + th[row][1] * uk[1].mag_iv() + th[row][2] * uk[2].mag_iv()
            })
            .collect()
    })
}

/// `Θ_n(u) = ([θ_row(u) ∗ w]_n)_row` with `w_k = 1/ω_k`.
fn big_theta(ts: &[Vec<Interval>; 3], winv: &[Interval], n: usize) -> [Interval; 3] {
    [0, 1, 2].map(|row| conv_by(&ts[row], winv.len(), |k| winv[k], n))
}

/// Coefficients of `Z` in `r` and `r²`, at `s = 1`.
pub fn compute_z(seg: &SegmentData, j: &JOperator, table: &AlphaTable) -> Result<ZBounds, ContractionError> {
    let model = Model::<Interval>::new(&seg.params)?;
    let th = model.theta();
    let lam = model.row_lambdas();
    let (m, big_m, dim) = (seg.m, seg.big_m(), seg.dim());
    let q = seg.space.q_iv();
    let rho = seg.space.rho_iv();
    let inv_rho = rho.recip()?;
    let two_over_rho = inv_rho + inv_rho;

    let omega = seg.space.weights(big_m + m + 1);
    let winv: Vec<Interval> = omega.iter().map(|w| w.recip()).collect::<Result<_, _>>()?;
    let w2: Vec<Interval> = (0..=big_m).map(|n| pi_n_sq::<Interval>(n) * winv[n]).collect();

    let u0 = seg.u0.to_interval();
    let du = seg.delta_u();
    let dt = seg.delta_t();
    let abs_dd = du.d.mag_iv();
    let th_u0 = theta_seq(&th, &u0);
    let th_du = theta_seq(&th, &du);

    // `½ (C_n + ε_n) λ`
    let dq = |n: usize| -> [Interval; 3] { lam.map(|l| table.cq[n].half() * l) };

    let total = seg.n_polys();
    let mut lin = vec![Interval::ZERO; total];
    let mut quad = vec![Interval::ZERO; total];

    // Finite block.
    let mut w1 = vec![Interval::ZERO; dim];
    w1[0] = inv_rho;
    for n in 0..m {
        for c in 0..3 {
            w1[1 + 3 * n + c] = winv[n];
        }
    }
    let mut quad_src = vec![Interval::ZERO; dim];
    let mut lin_src = vec![Interval::ZERO; dim];
    let du_n = |n: usize| du.u(n);
    for n in 0..m {
        let dqn = dq(n);
        let theta_d = big_theta(&th_du, &winv, n);
        // Contribution of the modes k ≥ m of V' to row n through Ū₀.
        let r_tilde: [Interval; 3] = [0, 1, 2].map(|row| {
            let mut acc = Interval::ZERO;
            for k in m..m + n {
                acc += th_u0[row][k - n] * winv[k];
            }
            acc.half()
        });
        let p: Interval = pi_n_sq(n);
        let dun = du_n(n);
        for c in 0..3 {
            let i = 1 + 3 * n + c;
            quad_src[i] = dqn[c] + two_over_rho * w2[n];
            lin_src[i] = r_tilde[c] + theta_d[c] + abs_dd * w2[n] + p * dun[c].mag_iv() * inv_rho;
        }
    }
    let a_block = abs_matvec(&j.jm, &quad_src);
    let defect_part = abs_iv_matvec(&j.defect, &w1);
    let src_part = abs_matvec(&j.jm, &lin_src);
    let dt_flat = dt.to_flat();
    let dt_w: Interval = dt_flat.iter().zip(&w1).map(|(v, w)| v.mag_iv() * *w).sum();
    for i in 0..dim {
        let col0 = Interval::point(j.jm.get(i, 0).abs());
        quad[i] = a_block[i];
        lin[i] = defect_part[i] + src_part[i] + col0 * dt_w;
    }

    // Modes m ≤ n < M: exact tail blocks.
    let rows: Vec<Result<(Row3, Row3), ContractionError>> = (m..big_m)
        .into_par_iter()
        .map(|n| {
            let jn = j.abs_tail(n)?;
            let t0 = big_theta(&th_u0, &winv, n);
            let t1 = big_theta(&th_du, &winv, n);
            let dqn = dq(n);
            let pw = w2[n];
            let qv = [0, 1, 2].map(|c| dqn[c] + two_over_rho * pw);
            let lv = [0, 1, 2].map(|c| t0[c] + t1[c] + abs_dd * pw);
            Ok((abs3(&jn, qv), abs3(&jn, lv)))
        })
        .collect();
    for (off, row) in rows.into_iter().enumerate() {
        let (qv, lv) = row?;
        let n = m + off;
        for c in 0..3 {
            quad[1 + 3 * n + c] = qv[c];
            lin[1 + 3 * n + c] = lv[c];
        }
    }

    // Uniform tail from M on.
    let (sup_j, sup_pj) = tail_sup(j, seg)?;
    let alpha_m = table.tail();
    let omega_m = crate::seqspace::weight_iv(big_m, q);
    let inv_om = omega_m.recip()?;
    let nu0 = norm_q(&u0.x, &u0.y, &u0.z, &seg.space);
    let ndu = norm_q(&du.x, &du.y, &du.z, &seg.space);
    let conv_c = alpha_m.half() * inv_om;
    let q_alpha = abs3(&sup_j, lam.map(|l| conv_c * l));
    let l_alpha = abs3(&sup_j, lam.map(|l| conv_c * (nu0 + ndu) * l));
    let ones = [Interval::ONE; 3];
    let q_pi = abs3(&sup_pj, ones.map(|o| o * two_over_rho * inv_om));
    let l_pi = abs3(&sup_pj, ones.map(|o| o * abs_dd * inv_om));
    for c in 0..3 {
        quad[1 + 3 * big_m + c] = q_alpha[c] + q_pi[c];
        lin[1 + 3 * big_m + c] = l_alpha[c] + l_pi[c];
    }
    Ok(ZBounds { lin, quad })
}
