//! Minimal dense matrices over any [`Scalar`], plus the interval
//! matrix-vector kernels used by the bounds.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::interval::Interval;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: T) {
        let e = &mut self.data[i * self.cols + j];
        *e = *e + v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(T) -> S) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl Mat<f64> {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// `A v` for a float matrix and an interval vector.
pub fn matvec_point_iv(a: &Mat<f64>, v: &[Interval]) -> Vec<Interval> {
    assert_eq!(a.cols(), v.len());
    (0..a.rows())
        .into_par_iter()
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(Interval::ZERO, |acc, (&aij, &vj)| acc + Interval::point(aij) * vj)
        })
        .collect()
}

/// Upper bound of `|A| v` for a float matrix and a non-negative vector of
/// upper bounds.
pub fn abs_matvec(a: &Mat<f64>, v: &[Interval]) -> Vec<Interval> {
    assert_eq!(a.cols(), v.len());
    (0..a.rows())
        .into_par_iter()
        .map(|i| {
            a.row(i).iter().zip(v).fold(Interval::ZERO, |acc, (&aij, &vj)| {
                acc + Interval::point(aij.abs()) * vj.mag_iv()
            })
        })
        .collect()
}

/// Upper bound of `|M| v` for an interval matrix and a vector of upper bounds.
pub fn abs_iv_matvec(a: &Mat<Interval>, v: &[Interval]) -> Vec<Interval> {
    assert_eq!(a.cols(), v.len());
    (0..a.rows())
        .into_par_iter()
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(Interval::ZERO, |acc, (&aij, &vj)| acc + aij.mag_iv() * vj.mag_iv())
        })
        .collect()
}

/// `A B` for a float `A` and an interval `B`, computed row by row in
/// parallel.
pub fn matmul_point_iv(a: &Mat<f64>, b: &Mat<Interval>) -> Mat<Interval> {
    assert_eq!(a.cols(), b.rows());
    let (n, p) = (a.rows(), b.cols());
    let rows: Vec<Vec<Interval>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![Interval::ZERO; p];
            for (k, &aik) in a.row(i).iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let s = Interval::point(aik);
                for (slot, &bkj) in acc.iter_mut().zip(b.row(k)) {
                    *slot += s * bkj;
                }
            }
            acc
        })
        .collect();
    Mat {
        rows: n,
        cols: p,
        data: rows.into_iter().flatten().collect(),
    }
}

/// Rigorous upper bound of the max-row-sum norm of an interval matrix.
pub fn norm_inf_iv(a: &Mat<Interval>) -> Interval {
    let mut best = Interval::ZERO;
    for i in 0..a.rows() {
        let s: Interval = a.row(i).iter().map(|v| v.mag_iv()).sum();
        best = best.max(s);
    }
    best
}
