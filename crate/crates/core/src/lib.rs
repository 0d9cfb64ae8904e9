//! Truncated minimal robust positively invariant (mRPI) sets for disturbed
//! linear systems `x⁺ = A x + w, w ∈ W`, a closed-form certificate on their
//! Hausdorff distance to the infinite-horizon set, and tube-MPC constraint
//! tightening built on that certificate.

pub mod bound;
pub mod error;
pub mod linalg;
pub mod mrpi;
pub mod norms;
pub mod sets;
pub mod systems;
pub mod tubempc;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use tol::Tolerances;
