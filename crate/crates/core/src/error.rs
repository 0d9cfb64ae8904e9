use thiserror::Error;

/// Errors raised by the numerical and set-valued routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:e} at step {step}")]
    SingularMatrix { step: usize, pivot: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("matrix is not Schur stable (spectral radius {rho})")]
    NotSchurStable { rho: f64 },

    #[error("closed loop is not Schur stable (spectral radius {rho}); pair is not stabilizable")]
    NotStabilizable { rho: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("QP is infeasible: lower bound exceeds upper bound at index {index}")]
    Infeasible { index: usize },

    #[error("generator capacity exceeded ({count} > {cap})")]
    CapacityExceeded { count: usize, cap: usize },

    #[error("Pontryagin difference is empty along axis {axis} (half-width {half_width}, reach {reach})")]
    EmptyDifference { axis: usize, half_width: f64, reach: f64 },

    #[error("sets are not nested: support gap {gap:e} in direction {direction}")]
    NotNested { direction: usize, gap: f64 },

    #[error("invalid contraction factor {0} (need 0 <= gamma < 1)")]
    InvalidContraction(f64),

    #[error("invalid tolerance {0} (need epsilon > 0)")]
    InvalidTolerance(f64),

    #[error("invalid disturbance radius {0} (need r_w >= 0)")]
    InvalidRadius(f64),

    #[error("induced norm {gamma} is not a contraction; reshape the norm")]
    NotContractive { gamma: f64 },

    #[error("horizon {requested} exceeds cached series horizon {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },

    #[error("error curve has {usable} usable rows, need at least 3")]
    DegenerateCurve { usable: usize },

    #[error("constraint tightening is infeasible: {0}")]
    InfeasibleTightening(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
