use super::Zonotope;
use crate::error::{Error, Result};

/// Axis-aligned box `{c + d : |dᵢ| ≤ hᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    center: Vec<f64>,
    half_widths: Vec<f64>,
}

impl BoxSet {
    pub fn new(center: Vec<f64>, half_widths: Vec<f64>) -> Result<Self> {
        if center.len() != half_widths.len() {
            return Err(Error::DimensionMismatch { expected: center.len(), found: half_widths.len() });
        }
        if let Some(h) = half_widths.iter().find(|h| !(**h >= 0.0 && h.is_finite())) {
            return Err(Error::InvalidBox(format!("half-width {h} must be finite and nonnegative")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBox("center must be finite".into()));
        }
        Ok(Self { center, half_widths })
    }

    /// Box centered at the origin.
    pub fn symmetric(half_widths: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0; half_widths.len()], half_widths)
    }

    /// `[lo, hi]` in every one of `dim` coordinates.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidBox(format!("empty interval [{lo}, {hi}]")));
        }
        Self::new(vec![0.5 * (lo + hi); dim], vec![0.5 * (hi - lo); dim])
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn lower(&self) -> Vec<f64> {
        self.center.iter().zip(&self.half_widths).map(|(c, h)| c - h).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.center.iter().zip(&self.half_widths).map(|(c, h)| c + h).collect()
    }

    /// Product of the full widths.
    pub fn volume(&self) -> f64 {
        self.half_widths.iter().map(|h| 2.0 * h).product()
    }

    /// Membership with an absolute slack.
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.center).zip(&self.half_widths).all(|((x, c), h)| (x - c).abs() <= h + slack)
    }

    /// Zonotope with one axis generator per nonzero half-width.
    pub fn to_zonotope(&self) -> Zonotope {
        let n = self.dim();
        let mut gens = Vec::new();
        for (i, &h) in self.half_widths.iter().enumerate() {
            if h > 0.0 {
                let mut g = vec![0.0; n];
                g[i] = h;
                gens.push(g);
            }
        }
        Zonotope::from_generators(self.center.clone(), gens).expect("box generators match the center dimension")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn to_zonotope_examples() {
        let z = BoxSet::symmetric(vec![1.0, 1.0]).unwrap().to_zonotope();
        assert_eq!(z.center(), &[0.0, 0.0]);
        assert_eq!(z.generators().collect::<Vec<_>>(), vec![&[1.0, 0.0][..], &[0.0, 1.0][..]]);

        let w = BoxSet::cube(6, -0.1, 0.1).unwrap().to_zonotope();
        assert_eq!(w.generator_count(), 6);
        assert!(w.generators().all(|g| (crate::linalg::norm2(g) - 0.1).abs() < 1e-15));

        let d = BoxSet::symmetric(vec![1.0, 0.0]).unwrap().to_zonotope();
        assert_eq!(d.generators().collect::<Vec<_>>(), vec![&[1.0, 0.0][..]]);
    }

    #[test]
    fn validation() {
        assert!(BoxSet::symmetric(vec![-1.0]).is_err());
        assert!(BoxSet::new(vec![0.0], vec![1.0, 1.0]).is_err());
        assert!(BoxSet::cube(2, 1.0, -1.0).is_err());
        let b = BoxSet::cube(2, -2.0, 2.0).unwrap();
        assert_eq!(b.volume(), 16.0);
        assert!(b.contains(&[2.0, -2.0], 0.0));
        assert!(!b.contains(&[2.1, 0.0], 0.0));
    }
}
