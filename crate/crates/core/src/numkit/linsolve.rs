//! LU factorization with partial pivoting for the small dense systems that
//! show up in the Lyapunov and Padé solves.

use super::{Mat, NumError};

/// Pivots below this fraction of the largest entry are treated as zero.
const PIVOT_TOL: f64 = 1e-13;

pub(crate) struct Lu {
    lu: Mat,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub(crate) fn factor(a: &Mat) -> Result<Self, NumError> {
        Self::factor_with_tol(a, PIVOT_TOL)
    }

    /// As [`Lu::factor`] with pivots at or below `tol · max|a_ij|` treated
    /// as zero; `tol = 0` only rejects exact zeros.
    pub(crate) fn factor_with_tol(a: &Mat, tol: f64) -> Result<Self, NumError> {
        let n = a.rows();
        if !a.is_square() {
            return Err(NumError::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let scale = a.max_abs();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= tol * scale || scale == 0.0 {
                return Err(NumError::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub(crate) fn det(&self) -> f64 {
        (0..self.lu.rows()).map(|i| self.lu[(i, i)]).product::<f64>() * self.sign
    }

    pub(crate) fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub(crate) fn solve_mat(&self, b: &Mat) -> Mat {
        let n = self.lu.rows();
        let mut out = Mat::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<f64> = (0..n).map(|i| b[(i, j)]).collect();
            for (i, v) in self.solve_vec(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}
