//! Tube MPC on top of the certified outer set: LQR pre-stabilization, tube
//! cross-sections (baseline ball or certified `E_N ⊕ B`), constraint
//! tightening, a condensed nominal MPC and Monte-Carlo closed-loop runs.

mod design;
mod mpc;
mod sim;

pub use design::{
    baseline_tube, certified_tube, feasible_set_report, map_cross_section, tighten, BaselineTube, CertifiedTube,
    FeasibleEntry, FeasibleReport, Method, TubeContext, TubeDesign, TubeFragment, TubeMethod, TubeRegistry,
};
pub use mpc::{solve_nominal_mpc, MpcConfig, NominalPlan};
pub use sim::{simulate_closed_loop, SimConfig, StepRecord, TrajectoryLog};

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, Lu, Matrix};
use crate::tol::Tolerances;

/// `x⁺ = A x + B u + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    pub a: Matrix,
    pub b: Matrix,
}

impl Plant {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        if b.rows() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: b.rows() });
        }
        Ok(Self { a, b })
    }

    /// Double integrator `A = [[1,1],[0,1]]`, `B = (0.5, 1)ᵀ`.
    pub fn double_integrator() -> Self {
        Self {
            a: Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]),
            b: Matrix::from_rows(&[[0.5], [1.0]]),
        }
    }

    pub fn dim_x(&self) -> usize {
        self.a.rows()
    }

    pub fn dim_u(&self) -> usize {
        self.b.cols()
    }

    /// `A + B K`.
    pub fn closed_loop(&self, k: &Matrix) -> Result<Matrix> {
        self.a.add(&self.b.matmul(k)?)
    }

    pub fn step(&self, x: &[f64], u: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a.matvec(x)?;
        let bu = self.b.matvec(u)?;
        Ok(ax.iter().zip(&bu).zip(w).map(|((a, b), c)| a + b + c).collect())
    }
}

/// Infinite-horizon discrete LQR gain (`u = K x`) and its Riccati matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrGain {
    pub k: Matrix,
    pub p: Matrix,
}

/// Riccati fixed-point iteration from `P = Q`.
pub fn dlqr(plant: &Plant, q: &Matrix, r: &Matrix) -> Result<LqrGain> {
    dlqr_with(plant, q, r, &Tolerances::default())
}

pub fn dlqr_with(plant: &Plant, q: &Matrix, r: &Matrix, tol: &Tolerances) -> Result<LqrGain> {
    let (n, m) = (plant.dim_x(), plant.dim_u());
    if q.rows() != n || q.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.rows() });
    }
    if r.rows() != m || r.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: r.rows() });
    }
    let (a, b) = (&plant.a, &plant.b);
    let at = a.transpose();
    let bt = b.transpose();
    let mut p = q.clone();
    for _ in 0..tol.riccati_max_iter {
        let gain = riccati_gain(&p, a, b, &bt, r, tol)?;
        // P⁺ = Q + AᵀPA − AᵀPB·X, X = (R + BᵀPB)⁻¹ BᵀPA
        let atp = at.matmul(&p)?;
        let next = q.add(&atp.matmul(a)?)?.sub(&atp.matmul(b)?.matmul(&gain)?)?.symmetrized();
        if !next.max_abs().is_finite() || next.max_abs() > 1e150 {
            return Err(Error::NotStabilizable { rho: spectral_radius(a)? });
        }
        let delta = next.sub(&p)?.max_abs();
        p = next;
        if delta <= tol.riccati * p.max_abs().max(1.0) {
            let k = riccati_gain(&p, a, b, &bt, r, tol)?.scale(-1.0);
            let rho = spectral_radius(&plant.closed_loop(&k)?)?;
            if rho >= 1.0 {
                return Err(Error::NotStabilizable { rho });
            }
            return Ok(LqrGain { k, p });
        }
    }
    Err(Error::NoConvergence { what: "Riccati iteration", iterations: tol.riccati_max_iter })
}

/// `(R + BᵀPB)⁻¹ BᵀPA`.
fn riccati_gain(p: &Matrix, a: &Matrix, b: &Matrix, bt: &Matrix, r: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let btp = bt.matmul(p)?;
    let s = r.add(&btp.matmul(b)?)?;
    let rhs = btp.matmul(a)?;
    let lu = Lu::new(&s, tol)?;
    let mut x = Matrix::zeros(rhs.rows(), rhs.cols());
    for j in 0..rhs.cols() {
        let col = lu.solve(&rhs.col(j))?;
        for i in 0..rhs.rows() {
            x[(i, j)] = col[i];
        }
    }
    Ok(x)
}
