use super::{BoxSet, Zonotope};
use crate::error::{Error, Result};
use crate::norms::{dual_norm, QuadraticNorm};

/// `{x : ‖x‖_P ≤ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBall {
    pub norm: QuadraticNorm,
    pub radius: f64,
}

impl NormBall {
    pub fn new(norm: QuadraticNorm, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius {radius} must be finite and nonnegative")));
        }
        Ok(Self { norm, radius })
    }

    pub fn dim(&self) -> usize {
        self.norm.dim()
    }

    /// `radius · ‖u‖_*`.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        Ok(self.radius * dual_norm(u, &self.norm)?)
    }

    /// `radius · √((P⁻¹)ⱼⱼ)` per axis.
    pub fn axis_extents(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.radius * self.norm.axis_reach(j)).collect()
    }
}

/// `core ⊕ pad`: a zonotope padded by a norm ball.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterSet {
    pub core: Zonotope,
    pub pad: NormBall,
}

impl OuterSet {
    pub fn new(core: Zonotope, pad: NormBall) -> Result<Self> {
        if core.dim() != pad.dim() {
            return Err(Error::DimensionMismatch { expected: core.dim(), found: pad.dim() });
        }
        Ok(Self { core, pad })
    }

    pub fn dim(&self) -> usize {
        self.core.dim()
    }

    /// Reach about the center per axis, zonotope plus ball.
    pub fn axis_extents(&self) -> Vec<f64> {
        self.core.axis_extents().iter().zip(self.pad.axis_extents()).map(|(a, b)| a + b).collect()
    }

    /// Support-function membership test over the given directions.
    pub fn contains_by_support(&self, x: &[f64], dirs: &[Vec<f64>], slack: f64) -> Result<bool> {
        for u in dirs {
            if crate::linalg::dot(u, x) > support_outer(self, u)? + slack {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `h_core(u) + radius · √(uᵀP⁻¹u)`.
pub fn support_outer(s: &OuterSet, u: &[f64]) -> Result<f64> {
    Ok(s.core.support(u)? + s.pad.support(u)?)
}

/// `X ⊖ S` for a box `X` and a center-symmetric outer set `S`.
pub fn pontryagin_diff_box(x: &BoxSet, s: &OuterSet) -> Result<BoxSet> {
    if x.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: s.dim() });
    }
    let reach = s.axis_extents();
    let mut half = Vec::with_capacity(x.dim());
    for (axis, (&h, &r)) in x.half_widths().iter().zip(&reach).enumerate() {
        if r > h {
            return Err(Error::EmptyDifference { axis, half_width: h, reach: r });
        }
        half.push(h - r);
    }
    let center = x.center().iter().zip(s.core.center()).map(|(a, b)| a - b).collect();
    BoxSet::new(center, half)
}
