//! Norm-shaping strategies, selectable by name.
//!
//! A shaper turns a system matrix into a [`ContractionReport`]: the norm it
//! picked and the contraction factor `‖A‖_P` under it. Shapers are looked up
//! in a [`ShaperRegistry`] by a spec string of the form `name[:argument]`:
//!
//! | spec              | strategy                                             |
//! |-------------------|------------------------------------------------------|
//! | `euclidean`       | `P = I`                                              |
//! | `lyapunov`        | `AᵀPA − P = −I`                                      |
//! | `diag:<grid-id>`  | best `P = diag(d)` over a grid (see [`DiagonalGrid`]) |

use std::collections::BTreeMap;

use super::{diagonal_scaling_search, lyapunov_norm, ContractionReport, QuadraticNorm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub trait NormShaper: Send + Sync {
    /// Spec string that recreates this shaper through the registry.
    fn name(&self) -> String;

    fn shape(&self, a: &Matrix) -> Result<ContractionReport>;
}

pub struct EuclideanShaper;

impl NormShaper for EuclideanShaper {
    fn name(&self) -> String {
        "euclidean".into()
    }

    fn shape(&self, a: &Matrix) -> Result<ContractionReport> {
        ContractionReport::evaluate(a, QuadraticNorm::euclidean(a.rows()))
    }
}

pub struct LyapunovShaper;

impl NormShaper for LyapunovShaper {
    fn name(&self) -> String {
        "lyapunov".into()
    }

    fn shape(&self, a: &Matrix) -> Result<ContractionReport> {
        lyapunov_norm(a)
    }
}

/// Candidate diagonals for [`DiagonalShaper`].
#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalGrid {
    /// Only `(1, …, 1)`.
    Unit,
    /// Product grid `{1, b, …, b^(levels−1)}` over coordinates 2..n, first
    /// coordinate pinned to 1 (γ is invariant under `P ↦ tP`).
    Geometric { base: f64, levels: usize },
    /// Caller-supplied list.
    Explicit(Vec<Vec<f64>>),
}

/// Largest product grid a shaper will enumerate.
pub const MAX_GRID_CANDIDATES: usize = 200_000;

impl DiagonalGrid {
    /// Parses `unit` or `geom:<base>:<levels>`.
    pub fn parse(id: &str) -> Result<Self> {
        let parts: Vec<&str> = id.split(':').collect();
        match parts.as_slice() {
            ["unit"] => Ok(Self::Unit),
            ["geom", base, levels] => {
                let base: f64 = base.parse().map_err(|_| bad_grid(id))?;
                let levels: usize = levels.parse().map_err(|_| bad_grid(id))?;
                if !(base > 0.0 && base.is_finite()) || levels == 0 {
                    return Err(bad_grid(id));
                }
                Ok(Self::Geometric { base, levels })
            }
            _ => Err(bad_grid(id)),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Self::Unit => "unit".into(),
            Self::Geometric { base, levels } => format!("geom:{base}:{levels}"),
            Self::Explicit(v) => format!("explicit[{}]", v.len()),
        }
    }

    pub fn candidates(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            Self::Unit => Ok(vec![vec![1.0; dim]]),
            Self::Explicit(v) => {
                if let Some(bad) = v.iter().find(|d| d.len() != dim) {
                    return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
                }
                Ok(v.clone())
            }
            Self::Geometric { base, levels } => {
                let free = dim.saturating_sub(1) as u32;
                let count = levels
                    .checked_pow(free)
                    .filter(|c| *c <= MAX_GRID_CANDIDATES)
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "grid {} has more than {MAX_GRID_CANDIDATES} candidates in dimension {dim}",
                            self.id()
                        ))
                    })?;
                let values: Vec<f64> = (0..*levels).map(|k| base.powi(k as i32)).collect();
                let mut out = Vec::with_capacity(count);
                for mut code in 0..count {
                    let mut d = vec![1.0; dim];
                    for slot in d.iter_mut().skip(1) {
                        *slot = values[code % levels];
                        code /= levels;
                    }
                    out.push(d);
                }
                Ok(out)
            }
        }
    }
}

fn bad_grid(id: &str) -> Error {
    Error::InvalidArgument(format!("unknown diagonal grid `{id}` (expected `unit` or `geom:<base>:<levels>`)"))
}

pub struct DiagonalShaper {
    pub grid: DiagonalGrid,
}

impl NormShaper for DiagonalShaper {
    fn name(&self) -> String {
        format!("diag:{}", self.grid.id())
    }

    fn shape(&self, a: &Matrix) -> Result<ContractionReport> {
        diagonal_scaling_search(a, &self.grid.candidates(a.rows())?)
    }
}

type ShaperFactory = fn(Option<&str>) -> Result<Box<dyn NormShaper>>;

/// Name → constructor table for norm shapers.
pub struct ShaperRegistry {
    factories: BTreeMap<&'static str, ShaperFactory>,
}

impl ShaperRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, factory: ShaperFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    /// Builds the shaper for `name[:argument]`.
    pub fn create(&self, spec: &str) -> Result<Box<dyn NormShaper>> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownStrategy(spec.to_string()))?;
        factory(arg)
    }
}

impl Default for ShaperRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("euclidean", |arg| no_arg("euclidean", arg).map(|_| Box::new(EuclideanShaper) as Box<dyn NormShaper>));
        r.register("lyapunov", |arg| no_arg("lyapunov", arg).map(|_| Box::new(LyapunovShaper) as Box<dyn NormShaper>));
        r.register("diag", |arg| {
            let grid = DiagonalGrid::parse(arg.unwrap_or("geom:3:5"))?;
            Ok(Box::new(DiagonalShaper { grid }))
        });
        r
    }
}

fn no_arg(name: &str, arg: Option<&str>) -> Result<()> {
    match arg {
        None => Ok(()),
        Some(a) => Err(Error::InvalidArgument(format!("`{name}` takes no argument, got `{a}`"))),
    }
}
