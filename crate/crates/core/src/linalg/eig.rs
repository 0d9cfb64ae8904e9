use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, norm2, Matrix};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

const JACOBI_MAX_SWEEPS: usize = 100;

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    let tol = Tolerances::default();
    s.check_symmetric(tol.symmetry)?;
    let n = s.rows();
    let mut a = s.symmetrized();
    let total = a.frobenius();
    if total == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "Jacobi eigenvalue sweep", iterations: JACOBI_MAX_SWEEPS });
    }
    let mut ev = a.diag();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn sym_eig_max(s: &Matrix) -> Result<f64> {
    Ok(sym_eigenvalues(s)?.last().copied().unwrap_or(0.0))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_eig_min(s: &Matrix) -> Result<f64> {
    Ok(sym_eigenvalues(s)?.first().copied().unwrap_or(0.0))
}

/// λ_max of a symmetric matrix by shifted power iteration.
///
/// The shift is the Gershgorin bound, so `S + σI ⪰ 0` and the dominant
/// eigenvalue of the shifted matrix is `λ_max + σ`. Runs from the all-ones
/// vector, then once from a seeded random start, and keeps the larger Rayleigh
/// quotient (the all-ones start can be orthogonal to the top eigenvector).
pub fn power_iteration_max(s: &Matrix, tol: &Tolerances) -> Result<f64> {
    s.check_symmetric(tol.symmetry)?;
    let n = s.rows();
    if n == 0 || s.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let shift = (0..n).map(|i| s.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let starts = [vec![1.0; n], (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>()];
    let mut best = f64::NEG_INFINITY;
    for start in starts {
        best = best.max(power_run(s, shift, start, tol)?);
    }
    Ok(best)
}

fn power_run(s: &Matrix, shift: f64, start: Vec<f64>, tol: &Tolerances) -> Result<f64> {
    let mut x = start;
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut lambda = dot(&x, &s.matvec(&x)?);
    for _ in 0..tol.eig_max_iter {
        let sx = s.matvec(&x)?;
        let mut y: Vec<f64> = sx.iter().zip(&x).map(|(a, b)| a + shift * b).collect();
        let ny = norm2(&y);
        if ny == 0.0 {
            return Ok(lambda);
        }
        y.iter_mut().for_each(|v| *v /= ny);
        let next = dot(&y, &s.matvec(&y)?);
        let scale = lambda.abs().max(next.abs()).max(f64::MIN_POSITIVE);
        x = y;
        if (next - lambda).abs() <= 1e-3 * tol.eig_rel * scale {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::NoConvergence { what: "shifted power iteration", iterations: tol.eig_max_iter })
}

/// Spectral radius max|λᵢ(A)| of a general square matrix, from the
/// eigenvalues of its real Schur form.
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if a.rows() == 0 || a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let tol = Tolerances::default();
    let schur = nalgebra::linalg::Schur::try_new(a.to_nalgebra(), f64::EPSILON, tol.eig_max_iter)
        .ok_or(Error::NoConvergence { what: "Schur decomposition", iterations: tol.eig_max_iter })?;
    Ok(schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
}
