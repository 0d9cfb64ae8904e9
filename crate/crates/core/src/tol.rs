//! Numerical tolerances shared by every module.

/// Central tolerance record. `Tolerances::default()` holds the values every
/// routine in the crate uses unless a caller passes its own record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Smallest pivot magnitude accepted by Gaussian elimination.
    pub pivot: f64,
    /// Relative symmetry tolerance for SPD inputs.
    pub symmetry: f64,
    /// Iteration cap for eigenvalue iterations.
    pub eig_max_iter: usize,
    /// Relative convergence tolerance for eigenvalue iterations.
    pub eig_rel: f64,
    /// Margin below 1 required of the spectral radius for Lyapunov solves.
    pub schur_margin: f64,
    /// KKT residual accepted from the box QP.
    pub qp_kkt: f64,
    /// Fixed-point tolerance of the Riccati iteration.
    pub riccati: f64,
    /// Iteration cap of the Riccati iteration.
    pub riccati_max_iter: usize,
    /// Slack allowed on set containment checks (support gaps, invariance).
    pub containment: f64,
    /// Hard cap on zonotope generator counts.
    pub max_generators: usize,
    /// Vertex enumeration is exact up to this many nonzero box widths.
    pub vertex_enum_max_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pivot: 1e-12,
            symmetry: 1e-10,
            eig_max_iter: 10_000,
            eig_rel: 1e-8,
            schur_margin: 1e-10,
            qp_kkt: 1e-6,
            riccati: 1e-10,
            riccati_max_iter: 10_000,
            containment: 1e-9,
            max_generators: 100_000,
            vertex_enum_max_dim: 16,
        }
    }
}
