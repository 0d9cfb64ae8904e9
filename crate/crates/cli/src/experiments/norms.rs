//! exp2: the same bound under Euclidean, best-diagonal and Lyapunov norms.

use mrpi_core::bound::tail_bound;
use mrpi_core::linalg::{lyapunov_residual, Matrix};
use mrpi_core::norms::{disturbance_radius, ContractionReport, ShaperRegistry};
use mrpi_core::sets::BoxSet;

use super::{random_system, write_manifest, write_output};
use crate::config::RunConfig;
use crate::failure::invariant;
use crate::svg::{Plot, Series, Style};

/// Horizon at which the demo-system bound ratio is reported.
pub const RATIO_AT: usize = 5;

/// `blockdiag([[0, 0.9], [0, 0]], 0.05·I₄)` with `W = [−1, 1]⁶`: Euclidean
/// contraction 0.9, but `diag(1, 81, …)` brings it to 0.1.
pub fn demo_system() -> (Matrix, BoxSet) {
    let block = Matrix::from_rows(&[[0.0, 0.9], [0.0, 0.0]]);
    let pad = Matrix::scaled_identity(4, 0.05);
    let a = Matrix::block_diag(&[&block, &pad]);
    (a, BoxSet::symmetric(vec![1.0; 6]).expect("unit box"))
}

#[derive(Debug, Clone)]
pub struct NormCurve {
    pub system: &'static str,
    pub shaper: String,
    pub report: ContractionReport,
    pub r_w: f64,
    pub lambda_min: f64,
    /// `(n, bound in its own norm, bound in Euclidean units)`; empty when
    /// the norm does not contract.
    pub bounds: Vec<(usize, f64, f64)>,
}

impl NormCurve {
    pub fn bound_at(&self, n: usize) -> Option<f64> {
        self.bounds.iter().find(|b| b.0 == n).map(|b| b.1)
    }
}

#[derive(Debug, Clone)]
pub struct NormComparison {
    pub curves: Vec<NormCurve>,
    /// `(system, lyapunov residual)`.
    pub lyapunov_residuals: Vec<(&'static str, f64)>,
}

impl NormComparison {
    pub fn curve(&self, system: &str, shaper_prefix: &str) -> Option<&NormCurve> {
        self.curves.iter().find(|c| c.system == system && c.shaper.starts_with(shaper_prefix))
    }

    /// Euclidean bound over diagonal bound, both in their own norms.
    pub fn demo_ratio(&self, n: usize) -> Option<f64> {
        let e = self.curve("demo", "euclidean")?.bound_at(n)?;
        let d = self.curve("demo", "diag")?.bound_at(n)?;
        Some(e / d)
    }
}

fn shaper_specs(cfg: &RunConfig) -> Vec<String> {
    vec!["euclidean".into(), format!("diag:{}", cfg.diag_grid), "lyapunov".into()]
}

pub fn compute(cfg: &RunConfig) -> anyhow::Result<NormComparison> {
    let registry = ShaperRegistry::default();
    let systems = [("random", random_system(cfg.dims[0], cfg.seed)?), ("demo", demo_system())];
    let mut curves = Vec::new();
    let mut lyapunov_residuals = Vec::new();
    for (system, (a, w)) in &systems {
        for spec in shaper_specs(cfg) {
            let report = registry.create(&spec)?.shape(a)?;
            let r_w = disturbance_radius(w, &report.norm)?.value;
            let lambda_min = report.norm.lambda_min()?;
            let mut bounds = Vec::new();
            if report.is_contractive() {
                for n in cfg.n_range.clone() {
                    let b = tail_bound(r_w, report.gamma, cfg.convention.terms(n))?;
                    bounds.push((n, b, b / lambda_min.sqrt()));
                }
            }
            if spec == "lyapunov" {
                let residual = lyapunov_residual(a, report.norm.p(), &Matrix::identity(a.rows()))?;
                lyapunov_residuals.push((*system, residual));
            }
            curves.push(NormCurve { system, shaper: spec, report, r_w, lambda_min, bounds });
        }
    }
    Ok(NormComparison { curves, lyapunov_residuals })
}

pub fn check(cmp: &NormComparison) -> anyhow::Result<()> {
    for c in &cmp.curves {
        if c.shaper == "lyapunov" && !c.report.is_contractive() {
            return Err(invariant(format!("{}: Lyapunov norm gives gamma = {}", c.system, c.report.gamma)));
        }
        if c.bounds.windows(2).any(|w| w[1].1 >= w[0].1 && w[0].1 > 0.0) {
            return Err(invariant(format!("{} / {}: bound is not strictly decreasing", c.system, c.shaper)));
        }
    }
    Ok(())
}

fn plot(cmp: &NormComparison, system: &str, title: String) -> Plot {
    let mut series = Vec::new();
    for (i, c) in cmp.curves.iter().filter(|c| c.system == system && !c.bounds.is_empty()).enumerate() {
        let own = c.bounds.iter().map(|b| (b.0 as f64, b.1)).collect();
        let euclid = c.bounds.iter().map(|b| (b.0 as f64, b.2)).collect();
        let label = format!("{} g={:.3} rW={:.3}", c.report.norm.label(), c.report.gamma, c.r_w);
        series.push(Series::new(label, own, Style::Solid, i));
        series.push(Series::new("", euclid, Style::Dashed, i));
    }
    Plot { title, x_label: "N".into(), y_label: "bound (solid: own norm, dashed: Euclidean units)".into(), log_y: true, series }
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<NormComparison> {
    let cmp = compute(cfg)?;
    check(&cmp)?;
    let mut meta = Vec::new();
    for c in &cmp.curves {
        let key = format!("{}.{}", c.system, c.shaper);
        meta.push((format!("{key}.norm_id"), c.report.norm.label().to_string()));
        meta.push((format!("{key}.gamma"), c.report.gamma.to_string()));
        meta.push((format!("{key}.r_w"), c.r_w.to_string()));
    }
    write_manifest(cfg, &meta)?;

    let mut csv = String::from("system,norm,n,gamma,r_w,d_bound,d_bound_euclid\n");
    for c in &cmp.curves {
        for (n, b, be) in &c.bounds {
            csv.push_str(&format!("{},{},{n},{},{},{b},{be}\n", c.system, c.report.norm.label(), c.report.gamma, c.r_w));
        }
    }
    write_output(&cfg.output_dir, "bounds.csv", &csv)?;
    let title = format!("Bound per norm, {}-D system (seed {})", cfg.dims[0], cfg.seed);
    write_output(&cfg.output_dir, "bounds_random.svg", &plot(&cmp, "random", title).render())?;
    write_output(&cfg.output_dir, "bounds_demo.svg", &plot(&cmp, "demo", "Bound per norm, demo system".into()).render())?;
    Ok(cmp)
}

pub fn print_report(cmp: &NormComparison) {
    for c in &cmp.curves {
        let status = if c.report.is_contractive() { "" } else { "  (not contractive, no bound)" };
        println!(
            "{:<6} {:<22} gamma {:.6} r_W {:.6}{}",
            c.system,
            c.report.norm.label(),
            c.report.gamma,
            c.r_w,
            status
        );
    }
    for (system, residual) in &cmp.lyapunov_residuals {
        println!("{system}: Lyapunov residual {residual:.3e}");
    }
    if let Some(r) = cmp.demo_ratio(RATIO_AT) {
        println!("demo: Euclidean / diagonal bound at N = {RATIO_AT}: {r:.4e}");
    }
}
