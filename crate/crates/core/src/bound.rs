//! Closed-form truncation certificate for the Minkowski series
//! `E_N = ⊕_{i<N} AⁱW`.
//!
//! With `γ = ‖A‖ < 1` in an induced norm and `r_W = max_{w∈W} ‖w‖`, the tail
//! `T_N = ⊕_{i≥N} AⁱW` lies in the ball of radius `r_W Σ_{i≥N} γⁱ`, hence
//!
//! ```text
//! d_H(E_N, E_∞) ≤ r_W γᴺ / (1 − γ).
//! ```
//!
//! Everything here uses the canonical indexing where `E_N` has `N` terms and
//! `E_∞ = E_N ⊕ T_N` exactly. [`ExponentConvention::NPlusOne`] relabels rows
//! for reports that index the set by its last power instead.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::norms::{disturbance_radius, dual_norm, induced_norm, QuadraticNorm};
use crate::sets::{support_outer, BoxSet, NormBall, OuterSet, Zonotope};

/// How a report's row index `n` maps onto the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentConvention {
    /// Row `n` is `E_n = ⊕_{i=0}^{n−1} AⁱW` with bound `r γⁿ/(1−γ)`.
    #[default]
    N,
    /// Row `n` is `⊕_{i=0}^{n} AⁱW` with bound `r γⁿ⁺¹/(1−γ)`.
    NPlusOne,
}

impl ExponentConvention {
    /// Number of series terms behind row `n`.
    pub fn terms(self, n: usize) -> usize {
        match self {
            Self::N => n,
            Self::NPlusOne => n + 1,
        }
    }
}

impl fmt::Display for ExponentConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::N => "N",
            Self::NPlusOne => "N+1",
        })
    }
}

impl FromStr for ExponentConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" => Ok(Self::N),
            "N+1" => Ok(Self::NPlusOne),
            other => Err(Error::InvalidArgument(format!("exponent convention must be N or N+1, got `{other}`"))),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidContraction(gamma));
    }
    Ok(())
}

fn check_radius(r_w: f64) -> Result<()> {
    if !(r_w >= 0.0 && r_w.is_finite()) {
        return Err(Error::InvalidRadius(r_w));
    }
    Ok(())
}

fn gamma_pow(gamma: f64, n: usize) -> f64 {
    if n > i32::MAX as usize {
        return 0.0;
    }
    gamma.powi(n as i32)
}

/// `r_w · γⁿ / (1 − γ)`.
pub fn tail_bound(r_w: f64, gamma: f64, n: usize) -> Result<f64> {
    check_gamma(gamma)?;
    check_radius(r_w)?;
    Ok(r_w * gamma_pow(gamma, n) / (1.0 - gamma))
}

/// Smallest `N` with `tail_bound(r_w, γ, N) ≤ ε`:
/// `⌈ln(ε(1−γ)/r_w) / ln γ⌉`, clamped at 0.
pub fn n_min(epsilon: f64, gamma: f64, r_w: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidTolerance(epsilon));
    }
    check_gamma(gamma)?;
    check_radius(r_w)?;
    if r_w == 0.0 || epsilon >= r_w / (1.0 - gamma) {
        return Ok(0);
    }
    if gamma == 0.0 {
        return Ok(1);
    }
    let raw = ((epsilon * (1.0 - gamma) / r_w).ln() / gamma.ln()).ceil();
    let mut n = if raw.is_finite() && raw > 0.0 { raw as usize } else { 0 };
    // the logarithm can land one off an exact power; settle on the true boundary
    while tail_bound(r_w, gamma, n)? > epsilon {
        n += 1;
    }
    while n > 0 && tail_bound(r_w, gamma, n - 1)? <= epsilon {
        n -= 1;
    }
    Ok(n)
}

/// `(N, γ, r_W, tail)` for a concrete system and norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationCertificate {
    /// Number of series terms in `E_N`.
    pub n: usize,
    pub gamma: f64,
    pub r_w: f64,
    /// `r_w · γᴺ / (1 − γ)`.
    pub tail: f64,
    pub norm_id: String,
    /// `r_w` came from the closed-form upper bound, not vertex enumeration.
    pub conservative_radius: bool,
}

impl TruncationCertificate {
    pub fn from_parts(n: usize, gamma: f64, r_w: f64, norm_id: impl Into<String>, conservative: bool) -> Result<Self> {
        let tail = tail_bound(r_w, gamma, n)?;
        Ok(Self { n, gamma, r_w, tail, norm_id: norm_id.into(), conservative_radius: conservative })
    }

    /// Same system and norm at another horizon.
    pub fn at(&self, n: usize) -> Result<Self> {
        Self::from_parts(n, self.gamma, self.r_w, self.norm_id.clone(), self.conservative_radius)
    }

    /// `n=…;gamma=…;r_w=…;tail=…;norm_id=…;conservative=…`
    pub fn to_kv(&self) -> String {
        format!(
            "n={};gamma={};r_w={};tail={};norm_id={};conservative={}",
            self.n, self.gamma, self.r_w, self.tail, self.norm_id, self.conservative_radius
        )
    }

    pub fn from_kv(s: &str) -> Result<Self> {
        let mut n = None;
        let mut gamma = None;
        let mut r_w = None;
        let mut tail = None;
        let mut norm_id = None;
        let mut conservative = None;
        let bad = |k: &str| Error::InvalidArgument(format!("bad certificate field `{k}`"));
        for pair in s.trim().split(';') {
            let (k, v) = pair.split_once('=').ok_or_else(|| bad(pair))?;
            match k {
                "n" => n = Some(v.parse::<usize>().map_err(|_| bad(k))?),
                "gamma" => gamma = Some(v.parse::<f64>().map_err(|_| bad(k))?),
                "r_w" => r_w = Some(v.parse::<f64>().map_err(|_| bad(k))?),
                "tail" => tail = Some(v.parse::<f64>().map_err(|_| bad(k))?),
                "norm_id" => norm_id = Some(v.to_string()),
                "conservative" => conservative = Some(v.parse::<bool>().map_err(|_| bad(k))?),
                _ => return Err(bad(k)),
            }
        }
        let missing = |k: &str| Error::InvalidArgument(format!("certificate is missing `{k}`"));
        let cert = Self {
            n: n.ok_or_else(|| missing("n"))?,
            gamma: gamma.ok_or_else(|| missing("gamma"))?,
            r_w: r_w.ok_or_else(|| missing("r_w"))?,
            tail: tail.ok_or_else(|| missing("tail"))?,
            norm_id: norm_id.ok_or_else(|| missing("norm_id"))?,
            conservative_radius: conservative.ok_or_else(|| missing("conservative"))?,
        };
        check_gamma(cert.gamma)?;
        check_radius(cert.r_w)?;
        Ok(cert)
    }
}

/// Assembles the certificate for `E_n` of `x⁺ = Ax + w, w ∈ W` under `norm`.
pub fn certify(a: &Matrix, w: &BoxSet, norm: &QuadraticNorm, n: usize) -> Result<TruncationCertificate> {
    let gamma = induced_norm(a, norm)?;
    if gamma >= 1.0 {
        return Err(Error::NotContractive { gamma });
    }
    let r = disturbance_radius(w, norm)?;
    TruncationCertificate::from_parts(n, gamma, r.value, norm.label(), r.conservative)
}

/// `E_N ⊕ B(tail)`, an outer approximation of `E_∞` that is itself robustly
/// invariant.
pub fn certified_outer(e_n: &Zonotope, cert: &TruncationCertificate, norm: &QuadraticNorm) -> Result<OuterSet> {
    OuterSet::new(e_n.clone(), NormBall::new(norm.clone(), cert.tail)?)
}

/// Support of `A·Z ⊕ W` in direction `u`: `h_Z(Aᵀu) + h_W(u)`.
pub fn support_step(a: &Matrix, w: &Zonotope, z: &OuterSet, u: &[f64]) -> Result<f64> {
    Ok(support_outer(z, &a.tr_matvec(u)?)? + w.support(u)?)
}

/// Largest violation of `h_{AZ⊕W}(u) ≤ h_Z(u)` over the directions; `≤ 0`
/// (up to rounding) means `Z` passed the invariance test.
pub fn invariance_excess(a: &Matrix, w: &BoxSet, z: &OuterSet, dirs: &[Vec<f64>]) -> Result<f64> {
    let wz = w.to_zonotope();
    let mut worst = f64::NEG_INFINITY;
    for u in dirs {
        worst = worst.max(support_step(a, &wz, z, u)? - support_outer(z, u)?);
    }
    Ok(worst)
}

/// Contraction check for `T(S) = A S ⊕ W`.
///
/// Returns `(lhs, rhs)` with `lhs` the sampled support distance between
/// `T(s1)` and `T(s2)` and `rhs = γ ·` the support distance between `s1` and
/// `s2`, both in `‖·‖_P`. The right-hand side is taken over `dirs` together
/// with every `Aᵀu` (normalized), so `lhs ≤ rhs` holds direction by direction
/// whenever `γ = ‖A‖_P`.
pub fn operator_contraction_gap(
    a: &Matrix,
    w: &BoxSet,
    s1: &Zonotope,
    s2: &Zonotope,
    dirs: &[Vec<f64>],
    norm: &QuadraticNorm,
) -> Result<(f64, f64)> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch { expected: s1.dim(), found: s2.dim() });
    }
    if s1.dim() != a.rows() || w.dim() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: s1.dim() });
    }
    let gamma = induced_norm(a, norm)?;
    let t1 = crate::mrpi::set_operator_apply(a, w, s1)?;
    let t2 = crate::mrpi::set_operator_apply(a, w, s2)?;

    let mut lhs: f64 = 0.0;
    let mut rhs_dirs = dirs.to_vec();
    for u in dirs {
        let d = dual_norm(u, norm)?;
        if d == 0.0 {
            continue;
        }
        lhs = lhs.max((t1.support(u)? - t2.support(u)?).abs() / d);
        let v = a.tr_matvec(u)?;
        if v.iter().any(|x| *x != 0.0) {
            rhs_dirs.push(v);
        }
    }
    let base = crate::sets::support_distance(s1, s2, &rhs_dirs, Some(norm))?;
    Ok((lhs, gamma * base))
}
