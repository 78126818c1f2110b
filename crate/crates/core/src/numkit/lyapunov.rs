use super::linsolve::Lu;
use super::{Mat, NumError, SpdMat};

/// Solves `AᵀP + PA = -Q` by vectorization.
///
/// The d²×d² system `(I⊗Aᵀ + Aᵀ⊗I) vec(P) = -vec(Q)` is solved with dense
/// LU; `vec` stacks columns. The result is symmetrized before it is
/// certified positive definite.
pub fn solve_lyapunov(a: &Mat, q: &SpdMat) -> Result<SpdMat, NumError> {
    let p = solve_lyapunov_general(a, q.as_mat())?;
    SpdMat::new(p)
}

/// As [`solve_lyapunov`] but without requiring a definite solution.
pub fn solve_lyapunov_general(a: &Mat, q: &Mat) -> Result<Mat, NumError> {
    if !a.is_square() {
        return Err(NumError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let d = a.rows();
    if q.rows() != d || q.cols() != d {
        return Err(NumError::Shape(format!("A is {d}x{d} but Q is {}x{}", q.rows(), q.cols())));
    }
    let n = d * d;
    let mut k = Mat::zeros(n, n);
    // vec index of P[i][j] is j*d + i
    for j in 0..d {
        for i in 0..d {
            let row = j * d + i;
            // (AᵀP)[i][j] = Σ_l A[l][i] P[l][j]
            for l in 0..d {
                k[(row, j * d + l)] += a[(l, i)];
            }
            // (PA)[i][j] = Σ_l P[i][l] A[l][j]
            for l in 0..d {
                k[(row, l * d + i)] += a[(l, j)];
            }
        }
    }
    let rhs: Vec<f64> = (0..n).map(|idx| -q[(idx % d, idx / d)]).collect();
    let lu = Lu::factor(&k).map_err(|e| match e {
        NumError::Singular => NumError::SingularLyapunov,
        other => other,
    })?;
    let v = lu.solve_vec(&rhs);
    let mut p = Mat::zeros(d, d);
    for (idx, val) in v.into_iter().enumerate() {
        p[(idx % d, idx / d)] = val;
    }
    Ok(p.symmetrized())
}

/// `‖AᵀP + PA + Q‖_F`.
pub fn lyapunov_residual(a: &Mat, p: &Mat, q: &Mat) -> f64 {
    let at = a.transpose();
    at.matmul(p).add(&p.matmul(a)).add(q).frobenius_norm()
}
