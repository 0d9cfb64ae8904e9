//! Quadratic norms `‖x‖_P = √(xᵀPx)`: induced matrix norms, contraction
//! factors, dual norms and disturbance radii over boxes.

mod shaping;

pub use shaping::{
    DiagonalGrid, DiagonalShaper, EuclideanShaper, LyapunovShaper, NormShaper, ShaperRegistry,
};

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, dot, norm2, solve_discrete_lyapunov, spectral_radius, sym_eig_max, sym_eig_min, Matrix,
    SpdFactor,
};
use crate::sets::BoxSet;
use crate::tol::Tolerances;

/// A quadratic norm with its Cholesky factor and `diag(P⁻¹)` cached.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticNorm {
    p: Matrix,
    factor: SpdFactor,
    p_inverse_diag: Vec<f64>,
    label: String,
}

impl QuadraticNorm {
    pub fn new(p: Matrix) -> Result<Self> {
        let factor = cholesky(&p)?;
        let p_inverse_diag = (0..p.rows())
            .map(|j| {
                let mut e = vec![0.0; p.rows()];
                e[j] = 1.0;
                factor.solve_lower(&e).map(|y| dot(&y, &y))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p: p.symmetrized(), factor, p_inverse_diag, label: "custom".into() })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(Matrix::identity(dim)).expect("identity is SPD").with_label("euclidean")
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diag(weights))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn factor(&self) -> &SpdFactor {
        &self.factor
    }

    /// `(P⁻¹)ⱼⱼ`; `√` of it is the reach of the unit ball along axis j.
    pub fn p_inverse_diag(&self) -> &[f64] {
        &self.p_inverse_diag
    }

    pub fn axis_reach(&self, axis: usize) -> f64 {
        self.p_inverse_diag[axis].sqrt()
    }

    /// Smallest eigenvalue of P; `‖x‖₂ ≤ ‖x‖_P / √λ_min`.
    pub fn lambda_min(&self) -> Result<f64> {
        sym_eig_min(&self.p)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: len });
        }
        Ok(())
    }
}

/// `√(xᵀPx)`.
pub fn vec_norm(x: &[f64], n: &QuadraticNorm) -> Result<f64> {
    n.check_dim(x.len())?;
    Ok(n.p.quad_form(x)?.max(0.0).sqrt())
}

/// `√(uᵀP⁻¹u)`, the dual of `‖·‖_P`.
pub fn dual_norm(u: &[f64], n: &QuadraticNorm) -> Result<f64> {
    n.check_dim(u.len())?;
    Ok(norm2(&n.factor.solve_lower(u)?))
}

/// Induced norm `sup ‖Ax‖_P / ‖x‖_P = σ_max(Lᵀ A L⁻ᵀ)` with `P = LLᵀ`.
pub fn induced_norm(a: &Matrix, n: &QuadraticNorm) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    n.check_dim(a.rows())?;
    let dim = a.rows();
    let l = n.factor.lower();
    // columns of L⁻ᵀ
    let mut linv_t = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        let c = n.factor.solve_upper(&e)?;
        for i in 0..dim {
            linv_t[(i, j)] = c[i];
        }
    }
    let m = l.transpose().matmul(a)?.matmul(&linv_t)?;
    let gram = m.transpose().matmul(&m)?.symmetrized();
    Ok(sym_eig_max(&gram)?.max(0.0).sqrt())
}

/// Contraction data of `A` under a particular norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    /// Induced norm `‖A‖_P`.
    pub gamma: f64,
    /// Spectral radius `ρ(A)`.
    pub rho: f64,
    pub norm: QuadraticNorm,
}

impl ContractionReport {
    pub fn evaluate(a: &Matrix, norm: QuadraticNorm) -> Result<Self> {
        let gamma = induced_norm(a, &norm)?;
        let rho = spectral_radius(a)?;
        Ok(Self { gamma, rho, norm })
    }

    pub fn is_contractive(&self) -> bool {
        self.gamma < 1.0
    }
}

fn require_schur(a: &Matrix) -> Result<f64> {
    let rho = spectral_radius(a)?;
    if rho >= 1.0 - Tolerances::default().schur_margin {
        return Err(Error::NotSchurStable { rho });
    }
    Ok(rho)
}

/// Norm from `AᵀPA − P = −I`; always yields `‖A‖_P < 1` for Schur `A`.
pub fn lyapunov_norm(a: &Matrix) -> Result<ContractionReport> {
    let rho = require_schur(a)?;
    let p = solve_discrete_lyapunov(a, &Matrix::identity(a.rows()))?;
    let norm = QuadraticNorm::new(p)?.with_label("lyapunov");
    let gamma = induced_norm(a, &norm)?;
    Ok(ContractionReport { gamma, rho, norm })
}

/// Best diagonal norm `P = diag(d)` over a candidate grid; ties go to the
/// first candidate.
pub fn diagonal_scaling_search(a: &Matrix, grid: &[Vec<f64>]) -> Result<ContractionReport> {
    let rho = require_schur(a)?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty diagonal grid".into()));
    }
    let mut best: Option<(f64, QuadraticNorm)> = None;
    for d in grid {
        if d.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("diagonal weights must be positive: {d:?}")));
        }
        let norm = QuadraticNorm::diagonal(d)?;
        let gamma = induced_norm(a, &norm)?;
        if best.as_ref().is_none_or(|(g, _)| gamma < *g) {
            best = Some((gamma, norm));
        }
    }
    let (gamma, norm) = best.expect("grid is nonempty");
    let label = format!("diag({})", join_weights(&norm.p.diag()));
    Ok(ContractionReport { gamma, rho, norm: norm.with_label(label) })
}

fn join_weights(d: &[f64]) -> String {
    d.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
}

/// `max_{w∈W} ‖w‖_P`, with a flag telling whether the value is the
/// conservative closed-form bound rather than the exact maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceRadius {
    pub value: f64,
    pub conservative: bool,
}

/// Exact by vertex enumeration when at most 16 axes have nonzero width,
/// otherwise `√(Σᵢⱼ |Pᵢⱼ| mᵢ mⱼ)` with `mᵢ = |cᵢ| + hᵢ`.
pub fn disturbance_radius(w: &BoxSet, n: &QuadraticNorm) -> Result<DisturbanceRadius> {
    disturbance_radius_with(w, n, &Tolerances::default())
}

pub fn disturbance_radius_with(w: &BoxSet, n: &QuadraticNorm, tol: &Tolerances) -> Result<DisturbanceRadius> {
    n.check_dim(w.dim())?;
    let active: Vec<usize> = (0..w.dim()).filter(|&i| w.half_widths()[i] > 0.0).collect();
    if active.len() <= tol.vertex_enum_max_dim {
        return Ok(DisturbanceRadius { value: vertex_max_norm(w, n, &active)?, conservative: false });
    }
    Ok(DisturbanceRadius { value: conservative_radius(w, n), conservative: true })
}

pub(crate) fn vertex_max_norm(w: &BoxSet, n: &QuadraticNorm, active: &[usize]) -> Result<f64> {
    let mut best: f64 = 0.0;
    let mut x = w.center().to_vec();
    for mask in 0u64..(1u64 << active.len()) {
        for (bit, &i) in active.iter().enumerate() {
            let s = if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
            x[i] = w.center()[i] + s * w.half_widths()[i];
        }
        best = best.max(n.p.quad_form(&x)?);
    }
    Ok(best.sqrt())
}

pub(crate) fn conservative_radius(w: &BoxSet, n: &QuadraticNorm) -> f64 {
    let m: Vec<f64> = w.center().iter().zip(w.half_widths()).map(|(c, h)| c.abs() + h).collect();
    let mut s = 0.0;
    for i in 0..m.len() {
        for j in 0..m.len() {
            s += n.p[(i, j)].abs() * m[i] * m[j];
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lyapunov_residual;

    fn nilpotent() -> Matrix {
        Matrix::from_rows(&[[0.0, 0.9], [0.0, 0.0]])
    }

    #[test]
    fn vec_norm_examples() {
        let e = QuadraticNorm::euclidean(2);
        assert_eq!(vec_norm(&[3.0, 4.0], &e).unwrap(), 5.0);
        assert_eq!(vec_norm(&[0.0, 0.0], &e).unwrap(), 0.0);
        let d = QuadraticNorm::diagonal(&[1.0, 81.0]).unwrap();
        assert_eq!(vec_norm(&[0.0, 1.0], &d).unwrap(), 9.0);
        assert!(matches!(vec_norm(&[1.0], &d), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dual_norm_examples() {
        let e = QuadraticNorm::euclidean(3);
        assert!((dual_norm(&[1.0, 2.0, 2.0], &e).unwrap() - 3.0).abs() < 1e-15);
        let d = QuadraticNorm::diagonal(&[4.0, 1.0]).unwrap();
        assert!((dual_norm(&[1.0, 0.0], &d).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(d.p_inverse_diag(), &[0.25, 1.0]);
    }

    #[test]
    fn induced_norm_examples() {
        let p = QuadraticNorm::new(Matrix::from_rows(&[[2.0, 0.3], [0.3, 1.0]])).unwrap();
        assert!((induced_norm(&Matrix::scaled_identity(2, 0.5), &p).unwrap() - 0.5).abs() < 1e-12);
        let e = QuadraticNorm::euclidean(2);
        assert!((induced_norm(&nilpotent(), &e).unwrap() - 0.9).abs() < 1e-12);
        let d = QuadraticNorm::diagonal(&[1.0, 81.0]).unwrap();
        assert!((induced_norm(&nilpotent(), &d).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_norm_examples() {
        let r = lyapunov_norm(&Matrix::scaled_identity(2, 0.5)).unwrap();
        assert!(r.norm.p().sub(&Matrix::scaled_identity(2, 4.0 / 3.0)).unwrap().max_abs() < 1e-14);
        assert!((r.gamma - 0.5).abs() < 1e-12);

        let r = lyapunov_norm(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(r.norm.p(), &Matrix::identity(2));
        assert_eq!(r.gamma, 0.0);

        let r = lyapunov_norm(&nilpotent()).unwrap();
        let euclid = induced_norm(&nilpotent(), &QuadraticNorm::euclidean(2)).unwrap();
        assert!(r.gamma < 1.0 && euclid < 1.0);
        assert!(lyapunov_residual(&nilpotent(), r.norm.p(), &Matrix::identity(2)).unwrap() < 1e-12);
    }

    #[test]
    fn lyapunov_norm_rejects_unstable() {
        let a = Matrix::scaled_identity(2, 1.2);
        assert!(matches!(lyapunov_norm(&a), Err(Error::NotSchurStable { .. })));
    }

    #[test]
    fn diagonal_search_examples() {
        let grid = vec![vec![1.0, 1.0], vec![1.0, 9.0], vec![1.0, 81.0]];
        let r = diagonal_scaling_search(&nilpotent(), &grid).unwrap();
        assert!(r.gamma <= 0.1 + 1e-12);
        assert_eq!(r.norm.label(), "diag(1,81)");

        let unit = diagonal_scaling_search(&nilpotent(), &[vec![1.0, 1.0]]).unwrap();
        let e = ContractionReport::evaluate(&nilpotent(), QuadraticNorm::euclidean(2)).unwrap();
        assert!((unit.gamma - e.gamma).abs() < 1e-15);
        for d in &grid {
            let g = induced_norm(&nilpotent(), &QuadraticNorm::diagonal(d).unwrap()).unwrap();
            assert!(r.gamma <= g);
        }
    }

    #[test]
    fn diagonal_search_tie_keeps_first() {
        let a = Matrix::scaled_identity(2, 0.5);
        let r = diagonal_scaling_search(&a, &[vec![1.0, 2.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(r.norm.label(), "diag(1,2)");
    }

    #[test]
    fn disturbance_radius_examples() {
        let e1 = QuadraticNorm::euclidean(1);
        let w = BoxSet::symmetric(vec![1.0]).unwrap();
        assert_eq!(disturbance_radius(&w, &e1).unwrap().value, 1.0);

        let w6 = BoxSet::symmetric(vec![0.1; 6]).unwrap();
        let r = disturbance_radius(&w6, &QuadraticNorm::euclidean(6)).unwrap();
        assert!((r.value - 0.06f64.sqrt()).abs() < 1e-15);
        assert!(!r.conservative);

        let w2 = BoxSet::symmetric(vec![0.05; 2]).unwrap();
        let r = disturbance_radius(&w2, &QuadraticNorm::euclidean(2)).unwrap();
        assert!((r.value - 0.05 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn disturbance_radius_falls_back_above_cutoff() {
        let tol = Tolerances { vertex_enum_max_dim: 2, ..Tolerances::default() };
        let p = Matrix::from_rows(&[[2.0, -0.5, 0.1], [-0.5, 1.0, 0.2], [0.1, 0.2, 1.5]]);
        let n = QuadraticNorm::new(p).unwrap();
        let w = BoxSet::symmetric(vec![0.3, 0.2, 0.1]).unwrap();
        let cons = disturbance_radius_with(&w, &n, &tol).unwrap();
        let exact = disturbance_radius(&w, &n).unwrap();
        assert!(cons.conservative && !exact.conservative);
        assert!(cons.value >= exact.value);
    }
}
