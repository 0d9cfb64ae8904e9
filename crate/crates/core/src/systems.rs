//! Seeded generators of Schur-stable test systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, Matrix};

/// Default spectral radius for a random system of dimension `dim`: 0.9 up to
/// six states, 0.8 above.
pub fn default_target_rho(dim: usize) -> f64 {
    if dim <= 6 {
        0.9
    } else {
        0.8
    }
}

/// Entries uniform in `[−1, 1]`, rescaled so that `ρ(A) = target_rho`.
pub fn random_schur(dim: usize, target_rho: f64, seed: u64) -> Result<Matrix> {
    if !(0.0..1.0).contains(&target_rho) {
        return Err(Error::InvalidArgument(format!("target spectral radius {target_rho} must lie in [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let data: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let m = Matrix::from_row_major(dim, dim, data)?;
        let rho = spectral_radius(&m)?;
        if rho > 1e-6 {
            return Ok(m.scale(target_rho / rho));
        }
    }
}

/// Symmetric system `Q diag(λ) Qᵀ` with `Q` a random orthogonal matrix, one
/// eigenvalue pinned at `±target_rho` and the rest uniform in
/// `(−target_rho, target_rho)`. For these `‖A‖₂ = ρ(A)`.
pub fn random_symmetric_schur(dim: usize, target_rho: f64, seed: u64) -> Result<Matrix> {
    if !(0.0..1.0).contains(&target_rho) {
        return Err(Error::InvalidArgument(format!("target spectral radius {target_rho} must lie in [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(dim, &mut rng);
    let mut lambda: Vec<f64> = (0..dim).map(|_| rng.random_range(-target_rho..target_rho)).collect();
    if let Some(first) = lambda.first_mut() {
        *first = if rng.random_bool(0.5) { target_rho } else { -target_rho };
    }
    let a = q.matmul(&Matrix::from_diag(&lambda))?.matmul(&q.transpose())?;
    Ok(a.symmetrized())
}

/// Gram–Schmidt on a Gaussian matrix.
fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for c in &cols {
            let p = crate::linalg::dot(&v, c);
            v.iter_mut().zip(c).for_each(|(x, y)| *x -= p * y);
        }
        let n = crate::linalg::norm2(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let mut q = Matrix::zeros(dim, dim);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..dim {
            q[(i, j)] = c[i];
        }
    }
    q
}
