//! Dense linear-algebra kernels: factorizations, eigenvalue extremes,
//! discrete Lyapunov solves and a bound-constrained QP. Sized for n ≤ 32.

mod eig;
mod factor;
mod lyapunov;
mod matrix;
mod qp;

pub use eig::{power_iteration_max, spectral_radius, sym_eig_max, sym_eig_min, sym_eigenvalues};
pub use factor::{cholesky, cholesky_with, solve_linear, solve_linear_with, Lu, SpdFactor};
pub use lyapunov::{lyapunov_residual, solve_discrete_lyapunov, solve_discrete_lyapunov_with};
pub use matrix::{dot, norm2, norm_inf, Matrix};
pub use qp::{kkt_residual, qp_objective, solve_qp, solve_qp_with};
