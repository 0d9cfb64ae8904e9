use super::Matrix;
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    solve_linear_with(a, b, &Tolerances::default())
}

pub fn solve_linear_with(a: &Matrix, b: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let lu = Lu::new(a, tol)?;
    lu.solve(b)
}

/// LU factorization `P A = L U` with partial pivoting, stored packed.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    packed: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &Matrix, tol: &Tolerances) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        let n = a.rows();
        let mut m = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, m[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= tol.pivot {
                return Err(Error::SingularMatrix { step: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    m.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv = 1.0 / m[k * n + k];
            for i in (k + 1)..n {
                let f = m[i * n + k] * inv;
                if f == 0.0 {
                    continue;
                }
                m[i * n + k] = f;
                for j in (k + 1)..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
            }
        }
        Ok(Self { n, packed: m, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.packed[i * n..i * n + i];
            x[i] -= row.iter().zip(&x[..i]).map(|(l, xj)| l * xj).sum::<f64>();
        }
        for i in (0..n).rev() {
            let row = &self.packed[i * n + i + 1..(i + 1) * n];
            let s = x[i] - row.iter().zip(&x[i + 1..]).map(|(u, xj)| u * xj).sum::<f64>();
            x[i] = s / self.packed[i * n + i];
        }
        Ok(x)
    }
}

/// Cholesky factor `L` of an SPD matrix, `P = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdFactor {
    lower: Matrix,
}

impl SpdFactor {
    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= l[(i, j)] * y[j];
            }
            y[i] = s / l[(i, i)];
        }
        Ok(y)
    }

    /// Solves `Lᵀ x = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let l = &self.lower;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= l[(j, i)] * x[j];
            }
            x[i] = s / l[(i, i)];
        }
        Ok(x)
    }

    /// Solves `P x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_upper(&self.solve_lower(b)?)
    }
}

pub fn cholesky(p: &Matrix) -> Result<SpdFactor> {
    cholesky_with(p, &Tolerances::default())
}

pub fn cholesky_with(p: &Matrix, tol: &Tolerances) -> Result<SpdFactor> {
    p.check_symmetric(tol.symmetry)?;
    let n = p.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = p[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            // lower triangle of p is the reference copy
            let mut s = p[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(SpdFactor { lower: l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_diagonal_solves() {
        let x = solve_linear(&Matrix::identity(2), &[3.0, -1.0]).unwrap();
        assert_eq!(x, vec![3.0, -1.0]);
        let a = Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]);
        assert_eq!(solve_linear(&a, &[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn random_well_conditioned_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 8;
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = rng.random_range(-1.0..1.0);
                }
                a[(i, i)] += 4.0;
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x = solve_linear(&a, &b).unwrap();
            let r: Vec<f64> = a.matvec(&x).unwrap().iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(norm_inf(&r) <= 1e-9 * (1.0 + norm_inf(&b)));
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(solve_linear(&a, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn cholesky_examples() {
        assert_eq!(cholesky(&Matrix::identity(3)).unwrap().lower(), &Matrix::identity(3));
        let l = cholesky(&Matrix::from_diag(&[4.0, 9.0])).unwrap();
        assert_eq!(l.lower(), &Matrix::from_diag(&[2.0, 3.0]));
        let l = cholesky(&Matrix::scaled_identity(2, 4.0 / 3.0)).unwrap();
        let r = (4.0f64 / 3.0).sqrt();
        assert!((l.lower()[(0, 0)] - r).abs() < 1e-15 && (l.lower()[(1, 1)] - r).abs() < 1e-15);
        assert_eq!(l.lower()[(1, 0)], 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite_and_asymmetric() {
        let p = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]);
        assert!(matches!(cholesky(&p), Err(Error::NotPositiveDefinite { row: 1, .. })));
        let q = Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]);
        assert!(matches!(cholesky(&q), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..10 {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = rng.random_range(-1.0..1.0);
                }
            }
            let p = m.matmul(&m.transpose()).unwrap().add(&Matrix::scaled_identity(n, 0.1)).unwrap();
            let f = cholesky(&p).unwrap();
            let llt = f.lower().matmul(&f.lower().transpose()).unwrap();
            assert!(llt.sub(&p).unwrap().frobenius() <= 1e-9 * p.frobenius());
            let b: Vec<f64> = (0..n).map(|i| i as f64 - 1.0).collect();
            let x = f.solve(&b).unwrap();
            let r = p.matvec(&x).unwrap();
            assert!(r.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-9));
        }
    }
}
