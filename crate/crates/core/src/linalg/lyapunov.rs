use super::{spectral_radius, Lu, Matrix};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Solves the discrete Lyapunov equation `Aᵀ P A − P = −Q`.
///
/// The equation is vectorized into the n²×n² system `(I − Aᵀ⊗Aᵀ) vec(P) = vec(Q)`
/// and solved densely, which is fine for n ≤ 20.
pub fn solve_discrete_lyapunov(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    solve_discrete_lyapunov_with(a, q, &Tolerances::default())
}

pub fn solve_discrete_lyapunov_with(a: &Matrix, q: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    if q.rows() != n || q.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.rows() });
    }
    q.check_symmetric(tol.symmetry)?;
    let rho = spectral_radius(a)?;
    if rho >= 1.0 - tol.schur_margin {
        return Err(Error::NotSchurStable { rho });
    }

    // Row (i,j): P_ij − Σ_{k,l} A_ki A_lj P_kl = Q_ij
    let nn = n * n;
    let mut sys = Matrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            let r = i * n + j;
            for k in 0..n {
                let aki = a[(k, i)];
                if aki == 0.0 {
                    continue;
                }
                for l in 0..n {
                    sys[(r, k * n + l)] -= aki * a[(l, j)];
                }
            }
            sys[(r, r)] += 1.0;
        }
    }
    let lu = Lu::new(&sys, tol)?;
    let p = lu.solve(q.as_slice())?;
    Ok(Matrix::from_row_major(n, n, p)?.symmetrized())
}

/// Frobenius norm of `Aᵀ P A − P + Q`.
pub fn lyapunov_residual(a: &Matrix, p: &Matrix, q: &Matrix) -> Result<f64> {
    let atpa = a.transpose().matmul(p)?.matmul(a)?;
    Ok(atpa.sub(p)?.add(q)?.frobenius())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cholesky;

    #[test]
    fn zero_dynamics_returns_q() {
        let p = solve_discrete_lyapunov(&Matrix::zeros(3, 3), &Matrix::identity(3)).unwrap();
        assert_eq!(p, Matrix::identity(3));
    }

    #[test]
    fn scalar_fixed_point() {
        // 0.25 p − p = −1  ⇒  p = 4/3
        let p = solve_discrete_lyapunov(&Matrix::scaled_identity(2, 0.5), &Matrix::identity(2)).unwrap();
        let expected = Matrix::scaled_identity(2, 4.0 / 3.0);
        assert!(p.sub(&expected).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn non_normal_residual_and_definiteness() {
        let a = Matrix::from_rows(&[[0.5, 2.0, 0.0], [0.0, -0.3, 1.0], [0.1, 0.0, 0.2]]);
        let q = Matrix::identity(3);
        let p = solve_discrete_lyapunov(&a, &q).unwrap();
        assert!(lyapunov_residual(&a, &p, &q).unwrap() <= 1e-8 * q.frobenius());
        assert!(cholesky(&p).is_ok());
    }

    #[test]
    fn unstable_matrix_is_rejected() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            solve_discrete_lyapunov(&a, &Matrix::identity(2)),
            Err(Error::NotSchurStable { .. })
        ));
    }
}
