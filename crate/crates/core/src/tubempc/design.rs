use std::collections::BTreeMap;
use std::fmt;

use crate::bound::{certified_outer, certify, n_min, TruncationCertificate};
use crate::error::{Error, Result};
use crate::linalg::{sym_eig_max, Matrix};
use crate::mrpi::{truncated_mrpi, MrpiSeries};
use crate::norms::{disturbance_radius, induced_norm, QuadraticNorm};
use crate::sets::{pontryagin_diff_box, BoxSet, NormBall, OuterSet, Zonotope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Baseline,
    Certified,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Baseline => "baseline",
            Method::Certified => "certified",
        })
    }
}

/// Everything a tube method needs: the pre-stabilized error dynamics
/// `e⁺ = A_cl e + w` and the norm they contract in.
#[derive(Debug, Clone)]
pub struct TubeContext {
    pub a_cl: Matrix,
    pub w: BoxSet,
    pub norm: QuadraticNorm,
    /// Target tail for the certified method's default horizon.
    pub epsilon: f64,
}

/// Cross-section of a tube, before constraint tightening.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeFragment {
    pub method: Method,
    pub cross_section: OuterSet,
    pub cert: Option<TruncationCertificate>,
}

pub trait TubeMethod: Send + Sync {
    /// Spec string that recreates this method through the registry.
    fn name(&self) -> String;

    fn build(&self, ctx: &TubeContext) -> Result<TubeFragment>;
}

/// Ball of radius `r_W / (1 − γ)`.
pub struct BaselineTube;

impl TubeMethod for BaselineTube {
    fn name(&self) -> String {
        "baseline".into()
    }

    fn build(&self, ctx: &TubeContext) -> Result<TubeFragment> {
        let gamma = induced_norm(&ctx.a_cl, &ctx.norm)?;
        let r_w = disturbance_radius(&ctx.w, &ctx.norm)?.value;
        baseline_tube(r_w, gamma, &ctx.norm)
    }
}

/// `E_N ⊕ B(r_W γᴺ / (1 − γ))`; `n = None` picks `n_min(ε) + 1`.
pub struct CertifiedTube {
    pub n: Option<usize>,
}

impl TubeMethod for CertifiedTube {
    fn name(&self) -> String {
        match self.n {
            Some(n) => format!("certified:{n}"),
            None => "certified".into(),
        }
    }

    fn build(&self, ctx: &TubeContext) -> Result<TubeFragment> {
        let n = match self.n {
            Some(n) => n,
            None => {
                let probe = certify(&ctx.a_cl, &ctx.w, &ctx.norm, 0)?;
                n_min(ctx.epsilon, probe.gamma, probe.r_w)? + 1
            }
        };
        certified_tube(&ctx.a_cl, &ctx.w, &ctx.norm, n)
    }
}

type TubeFactory = fn(Option<&str>) -> Result<Box<dyn TubeMethod>>;

/// Tube methods by name: `baseline`, `certified`, `certified:<n>`.
pub struct TubeRegistry {
    factories: BTreeMap<&'static str, TubeFactory>,
}

impl TubeRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, factory: TubeFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn create(&self, spec: &str) -> Result<Box<dyn TubeMethod>> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownStrategy(spec.to_string()))?;
        factory(arg)
    }
}

impl Default for TubeRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("baseline", |arg| match arg {
            None => Ok(Box::new(BaselineTube)),
            Some(a) => Err(Error::InvalidArgument(format!("baseline takes no argument, got `{a}`"))),
        });
        r.register("certified", |arg| {
            let n = arg
                .map(|a| a.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad horizon `{a}`"))))
                .transpose()?;
            Ok(Box::new(CertifiedTube { n }))
        });
        r
    }
}

/// `{0} ⊕ B(r_W / (1 − γ))`.
pub fn baseline_tube(r_w: f64, gamma: f64, norm: &QuadraticNorm) -> Result<TubeFragment> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidContraction(gamma));
    }
    if !(r_w >= 0.0 && r_w.is_finite()) {
        return Err(Error::InvalidRadius(r_w));
    }
    let ball = NormBall::new(norm.clone(), r_w / (1.0 - gamma))?;
    Ok(TubeFragment {
        method: Method::Baseline,
        cross_section: OuterSet::new(Zonotope::origin(norm.dim()), ball)?,
        cert: None,
    })
}

pub fn certified_tube(a_cl: &Matrix, w: &BoxSet, norm: &QuadraticNorm, n: usize) -> Result<TubeFragment> {
    let cert = certify(a_cl, w, norm, n)?;
    let series = MrpiSeries::new(a_cl, w, n)?;
    let e_n = truncated_mrpi(&series, n)?;
    Ok(TubeFragment {
        method: Method::Certified,
        cross_section: certified_outer(&e_n, &cert, norm)?,
        cert: Some(cert),
    })
}

/// `K·Z` as a zonotope padded by a Euclidean ball: the core maps exactly and
/// the radius scales by `‖K‖` from `‖·‖_P` to the 2-norm.
pub fn map_cross_section(k: &Matrix, z: &OuterSet) -> Result<OuterSet> {
    let core = z.core.linear_map(k)?;
    let factor = z.pad.norm.factor();
    // rows of K L⁻ᵀ are L⁻¹ kᵢ
    let mut m = Matrix::zeros(k.rows(), k.cols());
    for i in 0..k.rows() {
        let row = factor.solve_lower(k.row(i))?;
        for (j, v) in row.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let gram = m.matmul(&m.transpose())?.symmetrized();
    let gain = sym_eig_max(&gram)?.max(0.0).sqrt();
    OuterSet::new(core, NormBall::new(QuadraticNorm::euclidean(k.rows()), z.pad.radius * gain)?)
}

/// `(X ⊖ Z, U ⊖ K·Z)`.
pub fn tighten(x: &BoxSet, u: &BoxSet, k: &Matrix, frag: &TubeFragment) -> Result<(BoxSet, BoxSet)> {
    let infeasible = |what: &str, e: Error| match e {
        Error::EmptyDifference { axis, half_width, reach } => Error::InfeasibleTightening(format!(
            "{} {what} axis {axis}: cross-section reach {reach} exceeds half-width {half_width}",
            frag.method
        )),
        other => other,
    };
    let x_tight = pontryagin_diff_box(x, &frag.cross_section).map_err(|e| infeasible("state", e))?;
    let kz = map_cross_section(k, &frag.cross_section)?;
    let u_tight = pontryagin_diff_box(u, &kz).map_err(|e| infeasible("input", e))?;
    Ok((x_tight, u_tight))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeDesign {
    pub k_gain: Matrix,
    pub a_cl: Matrix,
    pub cross_section: OuterSet,
    pub x_tight: BoxSet,
    pub u_tight: BoxSet,
    pub method: Method,
    pub cert: Option<TruncationCertificate>,
}

impl TubeDesign {
    pub fn assemble(k_gain: &Matrix, a_cl: &Matrix, frag: TubeFragment, x: &BoxSet, u: &BoxSet) -> Result<Self> {
        let (x_tight, u_tight) = tighten(x, u, k_gain, &frag)?;
        Ok(Self {
            k_gain: k_gain.clone(),
            a_cl: a_cl.clone(),
            cross_section: frag.cross_section,
            x_tight,
            u_tight,
            method: frag.method,
            cert: frag.cert,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleEntry {
    pub name: String,
    pub half_widths: Vec<f64>,
    /// Product of widths; 0 when the tightening came out empty.
    pub volume: f64,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleReport {
    pub entries: Vec<FeasibleEntry>,
}

impl FeasibleReport {
    pub const CSV_HEADER: &'static str = "design,axis,halfwidth,volume";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            for (axis, h) in e.half_widths.iter().enumerate() {
                out.push_str(&format!("{},{axis},{h},{}\n", e.name, e.volume));
            }
        }
        out
    }

    pub fn entry(&self, name: &str) -> Option<&FeasibleEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Tightened state boxes `X ⊖ Z` side by side. Fragments whose cross-section
/// does not fit in `X` are reported as empty.
pub fn feasible_set_report(x: &BoxSet, frags: &[(String, TubeFragment)]) -> Result<FeasibleReport> {
    let mut entries = Vec::with_capacity(frags.len());
    for (name, frag) in frags {
        let entry = match pontryagin_diff_box(x, &frag.cross_section) {
            Ok(b) => FeasibleEntry { name: name.clone(), half_widths: b.half_widths().to_vec(), volume: b.volume(), empty: false },
            Err(Error::EmptyDifference { .. }) => {
                FeasibleEntry { name: name.clone(), half_widths: vec![0.0; x.dim()], volume: 0.0, empty: true }
            }
            Err(e) => return Err(e),
        };
        entries.push(entry);
    }
    Ok(FeasibleReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_ctx(a: f64) -> TubeContext {
        TubeContext {
            a_cl: Matrix::from_rows(&[[a]]),
            w: BoxSet::symmetric(vec![1.0]).unwrap(),
            norm: QuadraticNorm::euclidean(1),
            epsilon: 1e-3,
        }
    }

    #[test]
    fn baseline_radius() {
        let f = baseline_tube(0.0707, 0.5, &QuadraticNorm::euclidean(2)).unwrap();
        assert!((f.cross_section.pad.radius - 0.1414).abs() < 1e-12);
        let f0 = baseline_tube(0.0, 0.5, &QuadraticNorm::euclidean(2)).unwrap();
        assert_eq!(f0.cross_section.pad.radius, 0.0);
        assert!(matches!(baseline_tube(1.0, 1.0, &QuadraticNorm::euclidean(1)), Err(Error::InvalidContraction(_))));
    }

    #[test]
    fn scalar_certified_split_matches_baseline() {
        let ctx = scalar_ctx(0.5);
        let f = certified_tube(&ctx.a_cl, &ctx.w, &ctx.norm, 4).unwrap();
        assert!((f.cross_section.core.axis_extents()[0] - 1.875).abs() < 1e-15);
        assert!((f.cross_section.pad.radius - 0.125).abs() < 1e-15);
        assert!((f.cross_section.axis_extents()[0] - 2.0).abs() < 1e-15);

        let f0 = certified_tube(&ctx.a_cl, &ctx.w, &ctx.norm, 0).unwrap();
        let b = BaselineTube.build(&ctx).unwrap();
        assert_eq!(f0.cross_section.axis_extents(), b.cross_section.axis_extents());
    }

    #[test]
    fn tightening_examples() {
        let x = BoxSet::cube(2, -2.0, 2.0).unwrap();
        let u = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let k = Matrix::from_rows(&[[-0.5, -1.0]]);
        let zero = baseline_tube(0.0, 0.5, &QuadraticNorm::euclidean(2)).unwrap();
        assert_eq!(tighten(&x, &u, &k, &zero).unwrap(), (x.clone(), u.clone()));

        let ball = baseline_tube(0.0707, 0.5, &QuadraticNorm::euclidean(2)).unwrap();
        let (xt, ut) = tighten(&x, &u, &k, &ball).unwrap();
        assert!((xt.half_widths()[0] - 1.8586).abs() < 1e-12);
        assert!((xt.half_widths()[1] - 1.8586).abs() < 1e-12);
        // ‖K‖₂ = √1.25
        assert!((ut.half_widths()[0] - (1.0 - 0.1414 * 1.25f64.sqrt())).abs() < 1e-12);

        let huge = baseline_tube(5.0, 0.5, &QuadraticNorm::euclidean(2)).unwrap();
        assert!(matches!(tighten(&x, &u, &k, &huge), Err(Error::InfeasibleTightening(_))));
    }

    #[test]
    fn registry_round_trips_names() {
        let reg = TubeRegistry::default();
        assert_eq!(reg.names(), vec!["baseline", "certified"]);
        for spec in ["baseline", "certified", "certified:7"] {
            assert_eq!(reg.create(spec).unwrap().name(), spec);
        }
        assert!(matches!(reg.create("homothetic"), Err(Error::UnknownStrategy(_))));
        assert!(reg.create("certified:x").is_err());
    }

    #[test]
    fn default_certified_horizon_is_n_min_plus_one() {
        let ctx = scalar_ctx(0.5);
        let f = CertifiedTube { n: None }.build(&ctx).unwrap();
        // n_min(1e-3, 0.5, 1) = 11
        assert_eq!(f.cert.unwrap().n, 12);
    }

    #[test]
    fn report_flags_empty_tightening() {
        let x = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let small = baseline_tube(0.1, 0.5, &QuadraticNorm::euclidean(1)).unwrap();
        let big = baseline_tube(1.0, 0.5, &QuadraticNorm::euclidean(1)).unwrap();
        let r = feasible_set_report(&x, &[("a".into(), small.clone()), ("b".into(), small), ("c".into(), big)]).unwrap();
        assert_eq!(r.entries[0], FeasibleEntry { name: "a".into(), ..r.entries[1].clone() });
        assert!(r.entries[2].empty);
        assert_eq!(r.entries[2].volume, 0.0);
        assert!(r.to_csv().starts_with("design,axis,halfwidth,volume\na,0,0.8,1.6\n"));
    }
}
