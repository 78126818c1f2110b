//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005 parameterization).

use super::linsolve::Lu;
use super::{Mat, NumError};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `e^{At}`.
pub fn expm(a: &Mat, t: f64) -> Result<Mat, NumError> {
    if !a.is_square() {
        return Err(NumError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !t.is_finite() {
        return Err(NumError::NonFinite);
    }
    let n = a.rows();
    if t == 0.0 {
        return Ok(Mat::identity(n));
    }
    let at = a.scale(t);
    let norm = at.one_norm();

    let result = if let Some(&(m, _)) = THETA.iter().find(|(_, theta)| norm <= *theta) {
        let coeffs: &[f64] = match m {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            _ => &B9,
        };
        pade_low(&at, coeffs)?
    } else {
        let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
        let scaled = at.scale(2f64.powi(-s));
        let mut r = pade13(&scaled)?;
        for _ in 0..s {
            r = r.matmul(&r);
            if r.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(NumError::Overflow);
            }
        }
        r
    };
    if result.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(NumError::Overflow);
    }
    Ok(result)
}

fn pade_low(a: &Mat, b: &[f64]) -> Result<Mat, NumError> {
    let n = a.rows();
    let a2 = a.matmul(a);
    // even powers I, A², A⁴, ...
    let mut powers = vec![Mat::identity(n)];
    while powers.len() < b.len() / 2 {
        let next = powers.last().unwrap().matmul(&a2);
        powers.push(next);
    }
    let mut u = Mat::zeros(n, n);
    let mut v = Mat::zeros(n, n);
    for (k, pw) in powers.iter().enumerate() {
        u = u.add(&pw.scale(b[2 * k + 1]));
        v = v.add(&pw.scale(b[2 * k]));
    }
    solve_pade(&a.matmul(&u), &v)
}

fn pade13(a: &Mat) -> Result<Mat, NumError> {
    let n = a.rows();
    let b = &B13;
    let id = Mat::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let inner_u = a6.scale(b[13]).add(&a4.scale(b[11])).add(&a2.scale(b[9]));
    let u = a.matmul(
        &a6.matmul(&inner_u).add(&a6.scale(b[7])).add(&a4.scale(b[5])).add(&a2.scale(b[3])).add(&id.scale(b[1])),
    );
    let inner_v = a6.scale(b[12]).add(&a4.scale(b[10])).add(&a2.scale(b[8]));
    let v = a6.matmul(&inner_v).add(&a6.scale(b[6])).add(&a4.scale(b[4])).add(&a2.scale(b[2])).add(&id.scale(b[0]));
    solve_pade(&u, &v)
}

/// `(V - U)⁻¹ (V + U)`.
fn solve_pade(u: &Mat, v: &Mat) -> Result<Mat, NumError> {
    let lu = Lu::factor(&v.sub(u)).map_err(|_| NumError::Overflow)?;
    Ok(lu.solve_mat(&v.add(u)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_identity() {
        let a = Mat::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(expm(&a, 0.0).unwrap(), Mat::identity(2));
    }

    #[test]
    fn rotation_generator() {
        let theta = 0.7f64;
        let a = Mat::from_rows(&[[0.0, theta], [-theta, 0.0]]).unwrap();
        let e = expm(&a, 1.0).unwrap();
        let want = [[theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((e[(i, j)] - want[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_closed_form() {
        let e = expm(&Mat::diag(&[-1.0, 2.0]), 3.0).unwrap();
        assert!((e[(0, 0)] / (-3f64).exp() - 1.0).abs() < 1e-12);
        assert!((e[(1, 1)] / 6f64.exp() - 1.0).abs() < 1e-12);
        assert_eq!(e[(0, 1)], 0.0);
        assert_eq!(e[(1, 0)], 0.0);
    }

    #[test]
    fn every_pade_degree_matches_scalar_exp() {
        for x in [1e-3, 0.1, 0.5, 1.5, 4.0, 20.0, -30.0] {
            let e = expm(&Mat::diag(&[x]), 1.0).unwrap();
            assert!((e[(0, 0)] / x.exp() - 1.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn nilpotent_jordan_block() {
        let a = Mat::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let e = expm(&a, 2.0).unwrap();
        let want = Mat::from_rows(&[[1.0, 2.0, 2.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(e.sub(&want).max_abs() < 1e-13);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(expm(&Mat::diag(&[1.0]), 1000.0), Err(NumError::Overflow)));
    }
}
