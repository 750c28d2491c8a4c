//! The three-component Mimura-type system in cosine-coefficient form.
//!
//! With `k_n = (πn)²` and `[·∗·]` the cosine convolution, row `n` of `f` is
//!
//! ```text
//! f_x = (r1 − d k_n) x_n + y_n/ε − a1[x²] − a1[x∗y] − (b1 + 1/(εN))[x∗z] − 1/(εN)[y∗z]
//! f_y = (r1 − 1/ε − (d + βN) k_n) y_n − a1[y²] − a1[x∗y] − (b1 − 1/(εN))[y∗z] + 1/(εN)[x∗z]
//! f_z = (r2 − d k_n) z_n − a2[z²] − b2[x∗z] − b2[y∗z]
//! ```
//!
//! split as `f_n = L_n + Q_n` with `L_n` linear in `u` for fixed `d`, and
//! `Q_n` a sum of bilinear convolution terms.  Every routine is generic over
//! [`Scalar`] so the same code runs in floats and in intervals.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::interval::Interval;
use crate::linalg::Mat;
use crate::scalar::{pi_n_sq, Scalar};
use crate::seqspace::{conv, dconv, CosinePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("point has {got} coefficients per component, expected {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("invalid model parameter: {0}")]
    BadParameter(&'static str),
}

/// Fixed reaction parameters.  The diffusion `d` is not here: it is the
/// continuation variable and lives in the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub r1: f64,
    pub r2: f64,
    pub beta: f64,
    pub eps: f64,
    pub big_n: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            a1: 3.0,
            a2: 3.0,
            b1: 1.0,
            b2: 1.0,
            r1: 5.0,
            r2: 2.0,
            beta: 3.0,
            eps: 0.01,
            big_n: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.a1, self.a2, self.b1, self.b2, self.r1, self.r2, self.beta, self.eps, self.big_n,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::BadParameter("parameters must be finite"));
        }
        if !(self.eps > 0.0) {
            return Err(ModelError::BadParameter("eps must be positive"));
        }
        if !(self.big_n > 0.0) {
            return Err(ModelError::BadParameter("N must be positive"));
        }
        Ok(())
    }

    /// The spatially homogeneous coexistence state `(x, y, z)`.
    ///
    /// Summing the first two rows at `n = 0` gives `r1 = a1 S + b1 z` with
    /// `S = x + y`; the third gives `r2 = a2 z + b2 S`; the `1/ε` terms then
    /// force `y = z S / N`.
    pub fn constant_state(&self) -> [f64; 3] {
        let s = (self.r1 * self.a2 - self.b1 * self.r2) / (self.a1 * self.a2 - self.b1 * self.b2);
        let z = (self.r2 - self.b2 * s) / self.a2;
        let y = z * s / self.big_n;
        [s - y, y, z]
    }

    /// The homogeneous state as a point with `m` coefficients per component
    /// (only `n = 0` is nonzero and stores twice the value).
    pub fn constant_point(&self, d: f64, m: usize) -> CosinePoint<f64> {
        let [x, y, z] = self.constant_state();
        let mut p = CosinePoint::zeros(m.max(1));
        p.d = d;
        p.x.coeffs_mut()[0] = 2.0 * x;
        p.y.coeffs_mut()[0] = 2.0 * y;
        p.z.coeffs_mut()[0] = 2.0 * z;
        p
    }

    /// `λ1 = 4a1 + 2b1 + 4/(εN)` and `λ2 = 4b2 + 2a2`: sums of the absolute
    /// bilinear coefficients in each row of `DQ`.
    pub fn lambdas(&self) -> Result<(Interval, Interval), ModelError> {
        let c = Model::<Interval>::new(self)?.c;
        let four = Interval::point(4.0);
        let two = Interval::point(2.0);
        let l1 = four * c.a1.abs() + two * c.b1.abs() + four * c.inv_eps_n.abs();
        let l2 = four * c.b2.abs() + two * c.a2.abs();
        Ok((l1, l2))
    }
}

/// The model constants in the arithmetic of `T`.
#[derive(Debug, Clone, Copy)]
pub struct ModelCoeffs<T> {
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    pub r1: T,
    pub r2: T,
    /// `βN`
    pub beta_n: T,
    /// `1/ε`
    pub inv_eps: T,
    /// `1/(εN)`
    pub inv_eps_n: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualBlock<T> {
    pub fx: T,
    pub fy: T,
    pub fz: T,
}

impl<T: Scalar> ResidualBlock<T> {
    pub fn from_array(a: [T; 3]) -> Self {
        ResidualBlock {
            fx: a[0],
            fy: a[1],
            fz: a[2],
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.fx, self.fy, self.fz]
    }
}

/// One bilinear term `coef · [A ∗ B]_n` contributing to `row`.
#[derive(Debug, Clone, Copy)]
struct QuadTerm<T> {
    row: usize,
    coef: T,
    a: usize,
    b: usize,
}

#[derive(Debug, Clone)]
pub struct Model<T> {
    pub c: ModelCoeffs<T>,
    terms: Vec<QuadTerm<T>>,
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

impl<T: Scalar> Model<T> {
    pub fn new(p: &ModelParams) -> Result<Self, ModelError> {
        p.validate()?;
        let k = T::constant;
        let eps = k(p.eps);
        let inv_eps = eps
            .try_recip()
            .ok_or(ModelError::BadParameter("eps must be nonzero"))?;
        let inv_eps_n = (eps * k(p.big_n))
            .try_recip()
            .ok_or(ModelError::BadParameter("eps N must be nonzero"))?;
        let c = ModelCoeffs {
            a1: k(p.a1),
            a2: k(p.a2),
            b1: k(p.b1),
            b2: k(p.b2),
            r1: k(p.r1),
            r2: k(p.r2),
            beta_n: k(p.beta) * k(p.big_n),
            inv_eps,
            inv_eps_n,
        };
        let t = |row, coef, a, b| QuadTerm { row, coef, a, b };
        let terms = vec![
            t(X, -c.a1, X, X),
            t(X, -c.a1, X, Y),
            t(X, -(c.b1 + c.inv_eps_n), X, Z),
            t(X, -c.inv_eps_n, Y, Z),
            t(Y, -c.a1, Y, Y),
            t(Y, -c.a1, X, Y),
            t(Y, -(c.b1 - c.inv_eps_n), Y, Z),
            t(Y, c.inv_eps_n, X, Z),
            t(Z, -c.a2, Z, Z),
            t(Z, -c.b2, X, Z),
            t(Z, -c.b2, Y, Z),
        ];
        Ok(Model { c, terms })
    }

    /// `L_n(d)` as a 3×3 matrix acting on `u_n`.
    pub fn linear(&self, d: T, n: usize) -> [[T; 3]; 3] {
        let k: T = pi_n_sq(n);
        let c = &self.c;
        let zero = T::zero();
        [
            [c.r1 - d * k, c.inv_eps, zero],
            [zero, c.r1 - c.inv_eps - (d + c.beta_n) * k, zero],
            [zero, zero, c.r2 - d * k],
        ]
    }

    fn apply3(m: &[[T; 3]; 3], v: [T; 3]) -> [T; 3] {
        let row = |r: &[T; 3]| r[0] * v[0] + r[1] * v[1] + r[2] * v[2];
        [row(&m[0]), row(&m[1]), row(&m[2])]
    }

    /// `Q_n(u)`.
    pub fn q_n(&self, u: &CosinePoint<T>, n: usize) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for t in &self.terms {
            out[t.row] = out[t.row] + t.coef * conv(u.comp(t.a), u.comp(t.b), n);
        }
        out
    }

    pub fn f_n(&self, u: &CosinePoint<T>, n: usize) -> ResidualBlock<T> {
        let l = Self::apply3(&self.linear(u.d, n), u.u(n));
        let q = self.q_n(u, n);
        ResidualBlock::from_array([l[0] + q[0], l[1] + q[1], l[2] + q[2]])
    }

    /// Rows `0..m` of the Galerkin projection.
    pub fn f_proj(&self, u: &CosinePoint<T>, m: usize) -> Result<Vec<ResidualBlock<T>>, ModelError> {
        if u.m() != m {
            return Err(ModelError::DimensionMismatch { got: u.m(), want: m });
        }
        Ok((0..m).map(|n| self.f_n(u, n)).collect())
    }

    /// `DQ_n(V)(V')`, the symmetric bilinear form of the quadratic part.
    pub fn dq_apply(&self, v: &CosinePoint<T>, vp: &CosinePoint<T>, n: usize) -> ResidualBlock<T> {
        let mut out = [T::zero(); 3];
        for t in &self.terms {
            let s = conv(v.comp(t.a), vp.comp(t.b), n) + conv(vp.comp(t.a), v.comp(t.b), n);
            out[t.row] = out[t.row] + t.coef * s;
        }
        ResidualBlock::from_array(out)
    }

    /// `Df_n(U0)(V) = D_dL_n(U0) d_V + D_uL_n(U0) v + DQ_n(U0)(V)`.
    pub fn df_apply(&self, u0: &CosinePoint<T>, v: &CosinePoint<T>, n: usize) -> ResidualBlock<T> {
        let k: T = pi_n_sq(n);
        let ddl = u0.u(n).map(|c| -(k * c) * v.d);
        let dul = Self::apply3(&self.linear(u0.d, n), v.u(n));
        let dq = self.dq_apply(u0, v, n).as_array();
        ResidualBlock::from_array([0, 1, 2].map(|i| ddl[i] + dul[i] + dq[i]))
    }

    /// `D²f_n(U0)(V, V') = −(πn)²(d_V v'_n + d_V' v_n) + DQ_n(V)(V')`.
    pub fn d2f_apply(
        &self,
        _u0: &CosinePoint<T>,
        v: &CosinePoint<T>,
        vp: &CosinePoint<T>,
        n: usize,
    ) -> ResidualBlock<T> {
        let k: T = pi_n_sq(n);
        let (a, b) = (vp.u(n), v.u(n));
        let dq = self.dq_apply(v, vp, n).as_array();
        ResidualBlock::from_array([0, 1, 2].map(|i| -(k * (v.d * a[i] + vp.d * b[i])) + dq[i]))
    }

    /// Jacobian of the projection with respect to `(d, x_0, y_0, z_0, ...)`:
    /// a `3m × (3m+1)` matrix whose row `3n + c` is component `c` of mode `n`.
    pub fn df_rows(&self, u0: &CosinePoint<T>) -> Mat<T> {
        let m = u0.m();
        let mut j = Mat::zeros(3 * m, 3 * m + 1);
        for n in 0..m {
            let k: T = pi_n_sq(n);
            let un = u0.u(n);
            let lin = self.linear(u0.d, n);
            for c in 0..3 {
                let row = 3 * n + c;
                j.set(row, 0, -(k * un[c]));
                for b in 0..3 {
                    j.add_to(row, 1 + 3 * n + b, lin[c][b]);
                }
            }
            for t in &self.terms {
                let row = 3 * n + t.row;
                let (sa, sb) = (u0.comp(t.a), u0.comp(t.b));
                for kk in 0..m {
                    j.add_to(row, 1 + 3 * kk + t.a, t.coef * dconv(sb, n, kk));
                    j.add_to(row, 1 + 3 * kk + t.b, t.coef * dconv(sa, n, kk));
                }
            }
        }
        j
    }
}

impl Model<Interval> {
    /// `θ[row][comp]`: the sum of `|coef|` over the bilinear terms of `row`,
    /// each weighted by how often `comp` occurs in it.  Then
    /// `|DQ_n(V)(V')|_row ≤ Σ_comp θ[row][comp] [|v_comp| ∗ |v'|]_n` whenever
    /// every component of `v'` is bounded by the same sequence.
    pub fn theta(&self) -> [[Interval; 3]; 3] {
        let mut th = [[Interval::ZERO; 3]; 3];
        for t in &self.terms {
            let c = t.coef.abs();
            th[t.row][t.a] += c;
            th[t.row][t.b] += c;
        }
        th
    }

    /// `2 Σ |coef|` per row: `|DQ_n(V)(V')|_row ≤ ½ C λ_row ‖V‖ ‖V'‖` when every
    /// convolution obeys `|[a∗b]_n| ≤ ½ C ‖a‖ ‖b‖`.
    pub fn row_lambdas(&self) -> [Interval; 3] {
        let mut l = [Interval::ZERO; 3];
        for t in &self.terms {
            let c = t.coef.abs();
            l[t.row] += c + c;
        }
        l
    }
}

impl Model<f64> {
    pub fn df_matrix(&self, u0: &CosinePoint<f64>) -> DMatrix<f64> {
        self.df_rows(u0).to_dmatrix()
    }

    /// `f^[m]` flattened in the `(x_0, y_0, z_0, ...)` layout.
    pub fn f_flat(&self, u: &CosinePoint<f64>) -> Vec<f64> {
        (0..u.m()).flat_map(|n| self.f_n(u, n).as_array()).collect()
    }
}
