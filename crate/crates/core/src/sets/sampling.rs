use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Zonotope;
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::norms::{dual_norm, QuadraticNorm};

/// `2·dim` signed coordinate axes followed by `count` Gaussian directions
/// normalized onto the Euclidean unit sphere. Exact duplicates are dropped, so
/// `dim = 1` yields just `{+1, −1}`.
pub fn sample_unit_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim + count);
    let mut seen = HashSet::new();
    let mut push = |v: Vec<f64>, out: &mut Vec<Vec<f64>>| {
        let key: Vec<u64> = v.iter().map(|x| (x + 0.0).to_bits()).collect();
        if seen.insert(key) {
            out.push(v);
        }
    };
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            push(e, &mut out);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = 0;
    while drawn < count && dim > 0 {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = norm2(&v);
        if n < 1e-12 {
            continue;
        }
        drawn += 1;
        push(v.into_iter().map(|x| x / n).collect(), &mut out);
    }
    out
}

fn gap_scale(u: &[f64], norm: Option<&QuadraticNorm>) -> Result<f64> {
    match norm {
        None => Ok(norm2(u)),
        Some(n) => dual_norm(u, n),
    }
}

/// Sampled Hausdorff distance between nested sets `inner ⊆ outer`:
/// `max_u h_outer(u) − h_inner(u)` over Euclidean unit directions.
///
/// This never exceeds the true distance. In debug builds a negative gap below
/// `−1e-10` is reported as [`Error::NotNested`].
pub fn hausdorff_sampled(inner: &Zonotope, outer: &Zonotope, dirs: &[Vec<f64>]) -> Result<f64> {
    nested_gap(inner, outer, dirs, None)
}

/// Like [`hausdorff_sampled`] but measured in `‖·‖_P`: each gap is divided by
/// the dual norm of its direction.
pub fn hausdorff_sampled_in(
    inner: &Zonotope,
    outer: &Zonotope,
    dirs: &[Vec<f64>],
    norm: &QuadraticNorm,
) -> Result<f64> {
    nested_gap(inner, outer, dirs, Some(norm))
}

fn nested_gap(inner: &Zonotope, outer: &Zonotope, dirs: &[Vec<f64>], norm: Option<&QuadraticNorm>) -> Result<f64> {
    if inner.dim() != outer.dim() {
        return Err(Error::DimensionMismatch { expected: inner.dim(), found: outer.dim() });
    }
    let mut worst: f64 = 0.0;
    for (k, u) in dirs.iter().enumerate() {
        let scale = gap_scale(u, norm)?;
        if scale == 0.0 {
            continue;
        }
        let gap = (outer.support(u)? - inner.support(u)?) / scale;
        if cfg!(debug_assertions) && gap < -1e-10 {
            return Err(Error::NotNested { direction: k, gap });
        }
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// `max_u |h_a(u) − h_b(u)| / ‖u‖_*` for arbitrary (not necessarily nested)
/// convex sets; `norm = None` means Euclidean.
pub fn support_distance(a: &Zonotope, b: &Zonotope, dirs: &[Vec<f64>], norm: Option<&QuadraticNorm>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let mut worst: f64 = 0.0;
    for u in dirs {
        let scale = gap_scale(u, norm)?;
        if scale == 0.0 {
            continue;
        }
        worst = worst.max((a.support(u)? - b.support(u)?).abs() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::BoxSet;

    #[test]
    fn directions_are_unit_and_deterministic() {
        let d = sample_unit_directions(2, 4, 17);
        assert_eq!(d.len(), 8);
        assert!(d.iter().all(|u| (norm2(u) - 1.0).abs() <= 1e-12));
        assert_eq!(d, sample_unit_directions(2, 4, 17));
        assert_ne!(d, sample_unit_directions(2, 4, 18));
        assert_eq!(&d[..4], &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]);
    }

    #[test]
    fn one_dimensional_directions_deduplicate() {
        assert_eq!(sample_unit_directions(1, 50, 3), vec![vec![1.0], vec![-1.0]]);
    }

    #[test]
    fn hausdorff_examples() {
        let dirs = sample_unit_directions(1, 10, 0);
        let inner = BoxSet::symmetric(vec![1.5]).unwrap().to_zonotope();
        let outer = BoxSet::symmetric(vec![2.0]).unwrap().to_zonotope();
        assert_eq!(hausdorff_sampled(&outer, &outer, &dirs).unwrap(), 0.0);
        assert_eq!(hausdorff_sampled(&inner, &outer, &dirs).unwrap(), 0.5);
        assert!(matches!(hausdorff_sampled(&outer, &inner, &dirs), Err(Error::NotNested { .. })));
        assert_eq!(support_distance(&outer, &inner, &dirs, None).unwrap(), 0.5);
    }

    #[test]
    fn weighted_gap_divides_by_dual_norm() {
        let inner = Zonotope::origin(2);
        let outer = BoxSet::symmetric(vec![1.0, 0.0]).unwrap().to_zonotope();
        let n = QuadraticNorm::diagonal(&[4.0, 1.0]).unwrap();
        let dirs = vec![vec![1.0, 0.0]];
        // the segment's endpoint has ‖(1,0)‖_P = 2
        assert_eq!(hausdorff_sampled_in(&inner, &outer, &dirs, &n).unwrap(), 2.0);
    }
}
