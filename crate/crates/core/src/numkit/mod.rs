//! Dense real linear algebra for small matrices.

mod eigen;
mod expm;
mod linsolve;
mod lyapunov;
mod mat;

pub use eigen::{eigenvalues, pencil_eigen, pencil_extrema, spectral_abscissa, sym_eig_extrema, sym_eigen};
pub use expm::expm;
pub use lyapunov::{lyapunov_residual, solve_lyapunov, solve_lyapunov_general};
pub use mat::{EigExtrema, Mat, SpdMat, SYMMETRY_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
    #[error("matrix is not positive definite (Cholesky failed)")]
    NotSpd,
    #[error("matrix is singular")]
    Singular,
    #[error("Lyapunov operator is singular: an eigenvalue pair of A sums to ~0")]
    SingularLyapunov,
    #[error("QR iteration did not converge")]
    NoConvergence,
    #[error("matrix exponential overflowed")]
    Overflow,
}
