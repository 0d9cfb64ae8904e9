use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::tol::Tolerances;

/// `{c + Σᵢ αᵢ gᵢ : |αᵢ| ≤ 1}`. Generators are stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    center: Vec<f64>,
    gens: Vec<f64>,
}

impl Zonotope {
    /// The singleton `{c}`.
    pub fn point(center: Vec<f64>) -> Self {
        Self { center, gens: Vec::new() }
    }

    pub fn origin(dim: usize) -> Self {
        Self::point(vec![0.0; dim])
    }

    pub fn from_generators(center: Vec<f64>, generators: Vec<Vec<f64>>) -> Result<Self> {
        let n = center.len();
        let mut gens = Vec::with_capacity(n * generators.len());
        for g in generators {
            if g.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.len() });
            }
            gens.extend(g);
        }
        let z = Self { center, gens };
        z.check_capacity(&Tolerances::default())?;
        Ok(z)
    }

    pub(crate) fn from_flat(center: Vec<f64>, gens: Vec<f64>) -> Self {
        debug_assert!(center.is_empty() || gens.len().is_multiple_of(center.len()));
        Self { center, gens }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn generator_count(&self) -> usize {
        if self.dim() == 0 {
            0
        } else {
            self.gens.len() / self.dim()
        }
    }

    pub fn generators(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.gens.chunks_exact(self.dim().max(1))
    }

    /// Generator matrix with one generator per column.
    pub fn generator_matrix(&self) -> Matrix {
        let (n, m) = (self.dim(), self.generator_count());
        let mut g = Matrix::zeros(n, m);
        for (j, col) in self.generators().enumerate() {
            for i in 0..n {
                g[(i, j)] = col[i];
            }
        }
        g
    }

    fn check_capacity(&self, tol: &Tolerances) -> Result<()> {
        let count = self.generator_count();
        if count > tol.max_generators {
            return Err(Error::CapacityExceeded { count, cap: tol.max_generators });
        }
        Ok(())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: len });
        }
        Ok(())
    }

    /// `Z₁ ⊕ Z₂`: centers add, generator lists concatenate.
    pub fn minkowski_sum(&self, other: &Zonotope) -> Result<Zonotope> {
        self.check_dim(other.dim())?;
        let center = self.center.iter().zip(&other.center).map(|(a, b)| a + b).collect();
        let mut gens = Vec::with_capacity(self.gens.len() + other.gens.len());
        gens.extend_from_slice(&self.gens);
        gens.extend_from_slice(&other.gens);
        let z = Zonotope { center, gens };
        z.check_capacity(&Tolerances::default())?;
        Ok(z)
    }

    /// `M·Z`.
    pub fn linear_map(&self, m: &Matrix) -> Result<Zonotope> {
        self.check_dim(m.cols())?;
        let center = m.matvec(&self.center)?;
        let mut gens = Vec::with_capacity(self.generator_count() * m.rows());
        for g in self.generators() {
            gens.extend(m.matvec(g)?);
        }
        Ok(Zonotope { center, gens })
    }

    pub fn translate(&self, t: &[f64]) -> Result<Zonotope> {
        self.check_dim(t.len())?;
        let center = self.center.iter().zip(t).map(|(a, b)| a + b).collect();
        Ok(Zonotope { center, gens: self.gens.clone() })
    }

    /// Support function `uᵀc + Σᵢ |uᵀgᵢ|`.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u.len())?;
        Ok(self.support_unchecked(u))
    }

    pub(crate) fn support_unchecked(&self, u: &[f64]) -> f64 {
        dot(u, &self.center) + self.generators().map(|g| dot(u, g).abs()).sum::<f64>()
    }

    /// Per-axis reach about the center, `Σᵢ |gᵢ[j]|`.
    pub fn axis_extents(&self) -> Vec<f64> {
        let mut ext = vec![0.0; self.dim()];
        for g in self.generators() {
            for (e, v) in ext.iter_mut().zip(g) {
                *e += v.abs();
            }
        }
        ext
    }

    /// Point `c + Σ αᵢ gᵢ` for coefficients in `[-1, 1]`.
    pub fn point_at(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.generator_count() {
            return Err(Error::DimensionMismatch { expected: self.generator_count(), found: coeffs.len() });
        }
        let mut x = self.center.clone();
        for (g, a) in self.generators().zip(coeffs) {
            for (xi, gi) in x.iter_mut().zip(g) {
                *xi += a * gi;
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::BoxSet;

    fn interval(h: f64) -> Zonotope {
        BoxSet::symmetric(vec![h]).unwrap().to_zonotope()
    }

    #[test]
    fn minkowski_examples() {
        let unit = BoxSet::symmetric(vec![1.0, 1.0]).unwrap().to_zonotope();
        let s = unit.minkowski_sum(&Zonotope::origin(2)).unwrap();
        assert_eq!(s, unit);
        let s = interval(1.0).minkowski_sum(&interval(0.5)).unwrap();
        assert_eq!(s.support(&[1.0]).unwrap(), 1.5);
        assert_eq!(s.support(&[-1.0]).unwrap(), 1.5);
        assert!(matches!(unit.minkowski_sum(&interval(1.0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn linear_map_examples() {
        let unit = BoxSet::symmetric(vec![1.0, 1.0]).unwrap().to_zonotope();
        assert_eq!(unit.linear_map(&Matrix::identity(2)).unwrap(), unit);
        let half = unit.linear_map(&Matrix::scaled_identity(2, 0.5)).unwrap();
        assert_eq!(half.axis_extents(), vec![0.5, 0.5]);
        let rot = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let r = unit.linear_map(&rot).unwrap();
        for k in 0..16 {
            let t = k as f64 * 0.4;
            let u = [t.cos(), t.sin()];
            assert!((r.support(&u).unwrap() - unit.support(&u).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn support_examples() {
        let unit = BoxSet::symmetric(vec![1.0, 1.0]).unwrap().to_zonotope();
        let s = 0.5f64.sqrt();
        assert!((unit.support(&[s, s]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(unit.support(&[0.0, 0.0]).unwrap(), 0.0);
        // E_2 for a = 0.5, W = [-1, 1]
        let e2 = interval(1.0).minkowski_sum(&interval(0.5)).unwrap();
        assert_eq!(e2.support(&[1.0]).unwrap(), 1.5);
    }

    #[test]
    fn axis_extents_examples() {
        let z = Zonotope::from_generators(vec![0.0, 0.0], vec![vec![0.5, 0.0], vec![0.0, 0.25], vec![0.1, 0.1]])
            .unwrap();
        let e = z.axis_extents();
        assert!((e[0] - 0.6).abs() < 1e-15 && (e[1] - 0.35).abs() < 1e-15);
        assert_eq!(BoxSet::symmetric(vec![1.0, 1.0]).unwrap().to_zonotope().axis_extents(), vec![1.0, 1.0]);
        assert_eq!(Zonotope::origin(3).axis_extents(), vec![0.0; 3]);
    }

    #[test]
    fn generator_cap() {
        let many = vec![vec![1.0]; Tolerances::default().max_generators + 1];
        assert!(matches!(Zonotope::from_generators(vec![0.0], many), Err(Error::CapacityExceeded { .. })));
    }
}
