//! Compact convex sets: boxes, zonotopes and norm-ball padded zonotopes, with
//! Minkowski arithmetic, support functions, box Pontryagin differences and
//! direction-sampled Hausdorff distances.

mod boxes;
mod outer;
mod sampling;
mod zonotope;

pub use boxes::BoxSet;
pub use outer::{pontryagin_diff_box, support_outer, NormBall, OuterSet};
pub use sampling::{hausdorff_sampled, hausdorff_sampled_in, sample_unit_directions, support_distance};
pub use zonotope::Zonotope;

use crate::error::Result;
use crate::linalg::Matrix;

/// `Z₁ ⊕ Z₂`.
pub fn minkowski_sum(z1: &Zonotope, z2: &Zonotope) -> Result<Zonotope> {
    z1.minkowski_sum(z2)
}

/// `M·Z`.
pub fn linear_map(m: &Matrix, z: &Zonotope) -> Result<Zonotope> {
    z.linear_map(m)
}

/// `h_Z(u)`.
pub fn support(z: &Zonotope, u: &[f64]) -> Result<f64> {
    z.support(u)
}

pub fn box_to_zonotope(b: &BoxSet) -> Zonotope {
    b.to_zonotope()
}

pub fn axis_extents(z: &Zonotope) -> Vec<f64> {
    z.axis_extents()
}
