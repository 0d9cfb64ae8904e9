use super::{dot, Lu, Matrix};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Minimizes `½ zᵀHz + gᵀz` subject to `lower ≤ z ≤ upper`.
///
/// Primal active-set method on the bound constraints. `H` must be symmetric
/// positive definite; infinite bounds are allowed.
pub fn solve_qp(h: &Matrix, g: &[f64], lower: &[f64], upper: &[f64]) -> Result<Vec<f64>> {
    solve_qp_with(h, g, lower, upper, &Tolerances::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Free,
    Lower,
    Upper,
}

pub fn solve_qp_with(h: &Matrix, g: &[f64], lower: &[f64], upper: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let n = g.len();
    if !h.is_square() || h.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.rows() });
    }
    if lower.len() != n || upper.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: lower.len().min(upper.len()) });
    }
    if let Some(index) = (0..n).find(|&i| lower[i] > upper[i] || lower[i].is_nan() || upper[i].is_nan()) {
        return Err(Error::Infeasible { index });
    }

    let mut state = vec![Bound::Free; n];
    let mut z = vec![0.0; n];
    for i in 0..n {
        if lower[i] == upper[i] || 0.0 < lower[i] {
            z[i] = lower[i];
            state[i] = Bound::Lower;
        } else if 0.0 > upper[i] {
            z[i] = upper[i];
            state[i] = Bound::Upper;
        }
    }

    let scale = 1.0 + h.max_abs() + g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cap = 100 * (n + 1) * (n + 1);
    for _ in 0..cap {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == Bound::Free).collect();
        let target = subspace_minimizer(h, g, &z, &free, tol)?;
        let step: Vec<f64> = free.iter().zip(&target).map(|(&i, &t)| t - z[i]).collect();
        let step_norm = step.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        if step_norm <= 1e-14 * (1.0 + z.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            // stationary on the current face: check multiplier signs
            let grad = gradient(h, g, &z)?;
            let worst = (0..n)
                .filter_map(|i| match state[i] {
                    Bound::Lower if lower[i] < upper[i] && grad[i] < 0.0 => Some((i, -grad[i])),
                    Bound::Upper if lower[i] < upper[i] && grad[i] > 0.0 => Some((i, grad[i])),
                    _ => None,
                })
                .fold(None, |best: Option<(usize, f64)>, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            match worst {
                Some((i, v)) if v > 1e-13 * scale => state[i] = Bound::Free,
                _ => return Ok(z),
            }
            continue;
        }

        let mut alpha = 1.0;
        let mut blocking = None;
        for (k, &i) in free.iter().enumerate() {
            let p = step[k];
            if p < 0.0 && lower[i].is_finite() {
                let a = (lower[i] - z[i]) / p;
                if a < alpha {
                    alpha = a.max(0.0);
                    blocking = Some((i, Bound::Lower));
                }
            } else if p > 0.0 && upper[i].is_finite() {
                let a = (upper[i] - z[i]) / p;
                if a < alpha {
                    alpha = a.max(0.0);
                    blocking = Some((i, Bound::Upper));
                }
            }
        }
        for (k, &i) in free.iter().enumerate() {
            z[i] += alpha * step[k];
        }
        if let Some((i, b)) = blocking {
            z[i] = if b == Bound::Lower { lower[i] } else { upper[i] };
            state[i] = b;
        }
    }
    Err(Error::NoConvergence { what: "box QP active set", iterations: cap })
}

fn gradient(h: &Matrix, g: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    Ok(h.matvec(z)?.iter().zip(g).map(|(a, b)| a + b).collect())
}

/// Minimizer over the free coordinates with the others held at `z`.
fn subspace_minimizer(h: &Matrix, g: &[f64], z: &[f64], free: &[usize], tol: &Tolerances) -> Result<Vec<f64>> {
    if free.is_empty() {
        return Ok(Vec::new());
    }
    let m = free.len();
    let mut hff = Matrix::zeros(m, m);
    let mut rhs = vec![0.0; m];
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            hff[(a, b)] = h[(i, j)];
        }
        let mut r = -g[i];
        for j in 0..z.len() {
            if !free.contains(&j) {
                r -= h[(i, j)] * z[j];
            }
        }
        rhs[a] = r;
    }
    Lu::new(&hff, tol)?.solve(&rhs)
}

/// Largest violation of the box-QP KKT conditions at `z`.
pub fn kkt_residual(h: &Matrix, g: &[f64], lower: &[f64], upper: &[f64], z: &[f64]) -> Result<f64> {
    let grad = gradient(h, g, z)?;
    let mut worst: f64 = 0.0;
    for i in 0..z.len() {
        worst = worst.max((lower[i] - z[i]).max(0.0)).max((z[i] - upper[i]).max(0.0));
        let at_lower = lower[i].is_finite() && (z[i] - lower[i]).abs() <= 1e-9 * (1.0 + lower[i].abs());
        let at_upper = upper[i].is_finite() && (z[i] - upper[i]).abs() <= 1e-9 * (1.0 + upper[i].abs());
        let v = match (at_lower, at_upper) {
            (true, true) => 0.0,
            (true, false) => (-grad[i]).max(0.0),
            (false, true) => grad[i].max(0.0),
            (false, false) => grad[i].abs(),
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Objective `½ zᵀHz + gᵀz`.
pub fn qp_objective(h: &Matrix, g: &[f64], z: &[f64]) -> Result<f64> {
    Ok(0.5 * h.quad_form(z)? + dot(g, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_optimum() {
        let z = solve_qp(&Matrix::identity(2), &[-1.0, -1.0], &[-10.0; 2], &[10.0; 2]).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clipped_at_upper_bound() {
        let z = solve_qp(&Matrix::identity(1), &[-5.0], &[0.0], &[1.0]).unwrap();
        assert_eq!(z, vec![1.0]);
    }

    #[test]
    fn infinite_bounds_and_equal_bounds() {
        let h = Matrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]);
        let z = solve_qp(&h, &[1.0, -1.0], &[f64::NEG_INFINITY, 0.3], &[f64::INFINITY, 0.3]).unwrap();
        assert_eq!(z[1], 0.3);
        // 2 z0 + 0.5*0.3 + 1 = 0
        assert!((z[0] + (1.0 + 0.15) / 2.0).abs() < 1e-12);
        assert!(kkt_residual(&h, &[1.0, -1.0], &[f64::NEG_INFINITY, 0.3], &[f64::INFINITY, 0.3], &z).unwrap() < 1e-9);
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        assert!(matches!(
            solve_qp(&Matrix::identity(1), &[0.0], &[1.0], &[0.0]),
            Err(Error::Infeasible { index: 0 })
        ));
    }
}
