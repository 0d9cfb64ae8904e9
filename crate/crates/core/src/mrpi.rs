//! Truncated mRPI sets `E_N = ⊕_{i<N} AⁱW`, long-horizon reference sets and
//! truncation-error curves.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use crate::bound::{tail_bound, ExponentConvention};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::norms::{disturbance_radius, dual_norm, induced_norm, QuadraticNorm};
use crate::sets::{sample_unit_directions, BoxSet, Zonotope};

/// Default reference horizon standing in for `E_∞`.
pub const DEFAULT_K_REF: usize = 200;

/// Cached terms `AⁱW`, `i = 0..horizon`, of the disturbance series.
#[derive(Debug, Clone)]
pub struct MrpiSeries {
    system: Matrix,
    disturbance: BoxSet,
    blocks: Vec<Zonotope>,
}

impl MrpiSeries {
    pub fn new(a: &Matrix, w: &BoxSet, horizon: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        if w.dim() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: w.dim() });
        }
        let mut blocks = Vec::with_capacity(horizon);
        let mut term = w.to_zonotope();
        for i in 0..horizon {
            if i > 0 {
                term = term.linear_map(a)?;
            }
            blocks.push(term.clone());
        }
        Ok(Self { system: a.clone(), disturbance: w.clone(), blocks })
    }

    pub fn system(&self) -> &Matrix {
        &self.system
    }

    pub fn disturbance(&self) -> &BoxSet {
        &self.disturbance
    }

    pub fn horizon(&self) -> usize {
        self.blocks.len()
    }

    /// The term `AⁱW`.
    pub fn block(&self, i: usize) -> Option<&Zonotope> {
        self.blocks.get(i)
    }

    /// `E_n = ⊕_{i<n} AⁱW`; `E_0 = {0}`.
    pub fn truncated(&self, n: usize) -> Result<Zonotope> {
        if n > self.horizon() {
            return Err(Error::HorizonExceeded { requested: n, horizon: self.horizon() });
        }
        let dim = self.system.rows();
        let mut center = vec![0.0; dim];
        let per = self.disturbance.to_zonotope().generator_count();
        let cap = crate::tol::Tolerances::default().max_generators;
        if n * per > cap {
            return Err(Error::CapacityExceeded { count: n * per, cap });
        }
        let mut gens = Vec::with_capacity(n * per * dim);
        for b in &self.blocks[..n] {
            for (c, v) in center.iter_mut().zip(b.center()) {
                *c += v;
            }
            for g in b.generators() {
                gens.extend_from_slice(g);
            }
        }
        Ok(Zonotope::from_flat(center, gens))
    }

    /// Supports `h_{AⁱW}(u)` of the first `k` terms.
    pub fn block_supports(&self, u: &[f64], k: usize) -> Result<Vec<f64>> {
        if k > self.horizon() {
            return Err(Error::HorizonExceeded { requested: k, horizon: self.horizon() });
        }
        self.blocks[..k].iter().map(|b| b.support(u)).collect()
    }
}

pub fn truncated_mrpi(series: &MrpiSeries, n: usize) -> Result<Zonotope> {
    series.truncated(n)
}

/// `E_{k_ref}`, the stand-in for `E_∞`.
pub fn reference_mrpi(series: &MrpiSeries, k_ref: usize) -> Result<Zonotope> {
    series.truncated(k_ref)
}

/// `T(S) = A S ⊕ W`.
pub fn set_operator_apply(a: &Matrix, w: &BoxSet, s: &Zonotope) -> Result<Zonotope> {
    if w.dim() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: w.dim() });
    }
    s.linear_map(a)?.minkowski_sum(&w.to_zonotope())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    /// Row label under the curve's exponent convention.
    pub n: usize,
    /// Sampled `d_H(E, E_ref)` in the certificate norm.
    pub d_num: f64,
    pub d_bound: f64,
    pub gamma: f64,
    pub r_w: f64,
    /// `tail_bound(r_w, γ, k_ref)`, the reference set's own truncation error.
    pub slack: f64,
}

/// Sampled truncation errors next to their certified bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub rows: Vec<ErrorRow>,
    pub convention: ExponentConvention,
    pub seed: u64,
}

impl ErrorCurve {
    pub const CSV_HEADER: &'static str = "n,d_num,d_bound,gamma,r_w,convention,seed";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{},{},{}", r.n, r.d_num, r.d_bound, r.gamma, r.r_w, self.convention, self.seed);
        }
        s
    }

    /// Rows where `d_num > d_bound + slack + tol`.
    pub fn violations(&self, tol: f64) -> Vec<&ErrorRow> {
        self.rows.iter().filter(|r| r.d_num > r.d_bound + r.slack + tol).collect()
    }

    /// Rows with label `n ≥ from`.
    pub fn rows_from(&self, from: usize) -> ErrorCurve {
        ErrorCurve { rows: self.rows.iter().filter(|r| r.n >= from).cloned().collect(), ..self.clone() }
    }
}

/// Parameters of [`error_curve`] other than the system itself.
#[derive(Debug, Clone)]
pub struct CurveSettings {
    pub n_range: RangeInclusive<usize>,
    pub dir_count: usize,
    pub seed: u64,
    pub k_ref: usize,
    pub convention: ExponentConvention,
}

impl Default for CurveSettings {
    fn default() -> Self {
        Self { n_range: 1..=30, dir_count: 2000, seed: 0, k_ref: DEFAULT_K_REF, convention: ExponentConvention::N }
    }
}

/// Sampled `d_H(E_n, E_ref)` and the certified bound for every `n` in range,
/// over one shared direction set. Distances are measured in `norm`, as
/// `max_u |h_ref(u) − h_n(u)| / ‖u‖_*`.
pub fn error_curve(a: &Matrix, w: &BoxSet, norm: &QuadraticNorm, settings: &CurveSettings) -> Result<ErrorCurve> {
    let gamma = induced_norm(a, norm)?;
    if gamma >= 1.0 {
        return Err(Error::NotContractive { gamma });
    }
    let r_w = disturbance_radius(w, norm)?.value;
    let k_ref = settings.k_ref;
    let last_terms = settings.convention.terms(*settings.n_range.end());
    if last_terms > k_ref {
        return Err(Error::HorizonExceeded { requested: last_terms, horizon: k_ref });
    }
    let series = MrpiSeries::new(a, w, k_ref)?;
    let dirs = sample_unit_directions(a.rows(), settings.dir_count, settings.seed);

    let labels: Vec<usize> = settings.n_range.clone().collect();
    let mut d_num = vec![0.0f64; labels.len()];
    for u in &dirs {
        let scale = dual_norm(u, norm)?;
        let supports = series.block_supports(u, k_ref)?;
        // suffix[i] = Σ_{j ≥ i} h_{AʲW}(u)
        let mut suffix = vec![0.0; k_ref + 1];
        for i in (0..k_ref).rev() {
            suffix[i] = suffix[i + 1] + supports[i];
        }
        for (slot, &n) in d_num.iter_mut().zip(&labels) {
            *slot = slot.max(suffix[settings.convention.terms(n)].abs() / scale);
        }
    }
    let slack = tail_bound(r_w, gamma, k_ref)?;
    let rows = labels
        .iter()
        .zip(d_num)
        .map(|(&n, d)| {
            Ok(ErrorRow { n, d_num: d, d_bound: tail_bound(r_w, gamma, settings.convention.terms(n))?, gamma, r_w, slack })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurve { rows, convention: settings.convention, seed: settings.seed })
}

/// Floor below which `d_num` rows are ignored by [`fit_decay_slope`].
pub const SLOPE_FLOOR: f64 = 1e-14;

/// Least-squares slope of `ln d_num` against `n`.
pub fn fit_decay_slope(curve: &ErrorCurve) -> Result<f64> {
    let pts: Vec<(f64, f64)> =
        curve.rows.iter().filter(|r| r.d_num > SLOPE_FLOOR).map(|r| (r.n as f64, r.d_num.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateCurve { usable: pts.len() });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::hausdorff_sampled_in;

    fn scalar() -> (Matrix, BoxSet) {
        (Matrix::from_rows(&[[0.5]]), BoxSet::symmetric(vec![1.0]).unwrap())
    }

    #[test]
    fn truncated_examples() {
        let (a, w) = scalar();
        let s = MrpiSeries::new(&a, &w, 10).unwrap();
        assert_eq!(s.truncated(1).unwrap(), w.to_zonotope());
        assert_eq!(s.truncated(3).unwrap().support(&[1.0]).unwrap(), 1.75);
        assert_eq!(s.truncated(0).unwrap(), Zonotope::origin(1));
        assert!(matches!(s.truncated(11), Err(Error::HorizonExceeded { .. })));

        let nil = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let w2 = BoxSet::symmetric(vec![0.3, 0.2]).unwrap();
        let s = MrpiSeries::new(&nil, &w2, 6).unwrap();
        for u in crate::sets::sample_unit_directions(2, 20, 1) {
            let h2 = s.truncated(2).unwrap().support(&u).unwrap();
            for n in 3..=6 {
                assert!((s.truncated(n).unwrap().support(&u).unwrap() - h2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn general_center_is_summed() {
        let a = Matrix::from_rows(&[[0.5]]);
        let w = BoxSet::new(vec![1.0], vec![0.5]).unwrap();
        let s = MrpiSeries::new(&a, &w, 3).unwrap();
        assert_eq!(s.truncated(3).unwrap().center(), &[1.75]);
    }

    #[test]
    fn reference_examples() {
        let (a, w) = scalar();
        let s = MrpiSeries::new(&a, &w, 200).unwrap();
        let r = reference_mrpi(&s, 200).unwrap();
        assert!((r.support(&[1.0]).unwrap() - 2.0).abs() <= 2f64.powi(-199) * 2.0 + 1e-15);
        assert_eq!(reference_mrpi(&s, 7).unwrap(), truncated_mrpi(&s, 7).unwrap());
        let mut prev = 0.0;
        for k in [1, 5, 20, 100, 200] {
            let h = reference_mrpi(&s, k).unwrap().support(&[-1.0]).unwrap();
            assert!(h >= prev);
            prev = h;
        }
    }

    #[test]
    fn scalar_error_curve_matches_closed_form() {
        let (a, w) = scalar();
        let settings = CurveSettings { n_range: 1..=10, dir_count: 50, ..CurveSettings::default() };
        let c = error_curve(&a, &w, &QuadraticNorm::euclidean(1), &settings).unwrap();
        for r in &c.rows {
            let expected = 2f64.powi(1 - r.n as i32) * (1.0 - 2f64.powi(-((200 - r.n) as i32)));
            assert!((r.d_num - expected).abs() < 1e-12, "n={} {} vs {}", r.n, r.d_num, expected);
            assert!((r.d_num - r.d_bound).abs() < 1e-9);
        }
        assert!(c.violations(1e-9).is_empty());
    }

    #[test]
    fn zero_dynamics_curve_is_zero() {
        let a = Matrix::zeros(2, 2);
        let w = BoxSet::symmetric(vec![0.1, 0.2]).unwrap();
        let settings = CurveSettings { n_range: 1..=5, dir_count: 30, k_ref: 20, ..CurveSettings::default() };
        let c = error_curve(&a, &w, &QuadraticNorm::euclidean(2), &settings).unwrap();
        assert!(c.rows.iter().all(|r| r.d_num == 0.0));
    }

    #[test]
    fn curve_agrees_with_direct_hausdorff() {
        let a = Matrix::from_rows(&[[0.6, 0.3], [-0.2, 0.5]]);
        let w = BoxSet::symmetric(vec![0.1, 0.05]).unwrap();
        let norm = crate::norms::lyapunov_norm(&a).unwrap().norm;
        let settings = CurveSettings { n_range: 1..=6, dir_count: 100, seed: 9, k_ref: 60, ..CurveSettings::default() };
        let c = error_curve(&a, &w, &norm, &settings).unwrap();
        let s = MrpiSeries::new(&a, &w, 60).unwrap();
        let dirs = sample_unit_directions(2, 100, 9);
        let eref = s.truncated(60).unwrap();
        for r in &c.rows {
            let direct = hausdorff_sampled_in(&s.truncated(r.n).unwrap(), &eref, &dirs, &norm).unwrap();
            assert!((direct - r.d_num).abs() < 1e-12);
        }
    }

    #[test]
    fn plus_one_convention_shifts_terms() {
        let (a, w) = scalar();
        let settings = CurveSettings {
            n_range: 1..=5,
            dir_count: 4,
            convention: ExponentConvention::NPlusOne,
            ..CurveSettings::default()
        };
        let c = error_curve(&a, &w, &QuadraticNorm::euclidean(1), &settings).unwrap();
        for r in &c.rows {
            assert!((r.d_bound - 2f64.powi(-(r.n as i32))).abs() < 1e-15);
            assert!(r.d_num <= r.d_bound + r.slack + 1e-12);
        }
        assert!(c.to_csv().lines().nth(1).unwrap().ends_with(",N+1,0"));
    }

    #[test]
    fn slope_examples() {
        let geo = ErrorCurve {
            rows: (1..=12)
                .map(|n| ErrorRow { n, d_num: 3.0 * 0.7f64.powi(n as i32), d_bound: 1.0, gamma: 0.7, r_w: 1.0, slack: 0.0 })
                .collect(),
            convention: ExponentConvention::N,
            seed: 0,
        };
        assert!((fit_decay_slope(&geo).unwrap() - 0.7f64.ln()).abs() < 1e-10);

        let flat = ErrorCurve {
            rows: geo.rows.iter().map(|r| ErrorRow { d_num: 0.2, ..r.clone() }).collect(),
            ..geo.clone()
        };
        assert!(fit_decay_slope(&flat).unwrap().abs() < 1e-12);
        let dead = ErrorCurve { rows: geo.rows.iter().map(|r| ErrorRow { d_num: 0.0, ..r.clone() }).collect(), ..geo };
        assert!(matches!(fit_decay_slope(&dead), Err(Error::DegenerateCurve { usable: 0 })));
    }

    #[test]
    fn scalar_slope_is_ln_half() {
        let (a, w) = scalar();
        let settings = CurveSettings { n_range: 1..=10, dir_count: 4, ..CurveSettings::default() };
        let c = error_curve(&a, &w, &QuadraticNorm::euclidean(1), &settings).unwrap();
        let s = fit_decay_slope(&c).unwrap();
        assert!((s - 0.5f64.ln()).abs() <= 0.01 * 0.5f64.ln().abs());
    }

    #[test]
    fn operator_iterates_match_truncation() {
        let a = Matrix::from_rows(&[[0.4, -0.3], [0.2, 0.6]]);
        let w = BoxSet::new(vec![0.01, 0.0], vec![0.1, 0.2]).unwrap();
        let s = MrpiSeries::new(&a, &w, 8).unwrap();
        let dirs = sample_unit_directions(2, 64, 4);
        let mut it = Zonotope::origin(2);
        assert_eq!(set_operator_apply(&a, &w, &it).unwrap(), w.to_zonotope());
        for n in 1..=8 {
            it = set_operator_apply(&a, &w, &it).unwrap();
            let e = s.truncated(n).unwrap();
            for u in &dirs {
                assert!((it.support(u).unwrap() - e.support(u).unwrap()).abs() < 1e-12);
            }
        }
    }
}
