//! exp1 and exp3: sampled truncation error against the certified bound.

use mrpi_core::mrpi::{error_curve, fit_decay_slope, CurveSettings, ErrorCurve};
use mrpi_core::norms::ContractionReport;

use super::{random_system, shape, write_manifest, write_output};
use crate::config::RunConfig;
use crate::failure::invariant;
use crate::svg::{Plot, Series, Style};

/// Rows with label below this are left out of the slope fit.
pub const SLOPE_FROM: usize = 10;

/// Slack on `d_num ≤ d_bound + reference slack`.
pub const SOUNDNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct CurveRun {
    pub dim: usize,
    pub report: ContractionReport,
    pub curve: ErrorCurve,
    /// Fitted slope of `ln d_num`; `None` when too few rows are usable.
    pub slope: Option<f64>,
}

impl CurveRun {
    /// `|slope − ln γ| / |ln γ|`.
    pub fn slope_deviation(&self) -> Option<f64> {
        let lg = self.report.gamma.ln();
        self.slope.map(|s| (s - lg).abs() / lg.abs())
    }
}

pub fn compute(cfg: &RunConfig) -> anyhow::Result<Vec<CurveRun>> {
    let settings = CurveSettings {
        n_range: cfg.n_range.clone(),
        dir_count: cfg.dir_count,
        seed: cfg.seed,
        k_ref: cfg.k_ref,
        convention: cfg.convention,
    };
    let mut runs = Vec::with_capacity(cfg.dims.len());
    for &dim in &cfg.dims {
        let (a, w) = random_system(dim, cfg.seed)?;
        let report = shape(&cfg.norm, &a)?;
        let curve = error_curve(&a, &w, &report.norm, &settings)?;
        let tail = curve.rows_from(SLOPE_FROM);
        let fit_on = if tail.rows.len() >= 3 { &tail } else { &curve };
        let slope = fit_decay_slope(fit_on).ok();
        runs.push(CurveRun { dim, report, curve, slope });
    }
    Ok(runs)
}

pub fn check_soundness(runs: &[CurveRun]) -> anyhow::Result<()> {
    for run in runs {
        if let Some(row) = run.curve.violations(SOUNDNESS_TOL).first() {
            return Err(invariant(format!(
                "dim {}: at N = {} sampled distance {} exceeds bound {} + reference slack {}",
                run.dim, row.n, row.d_num, row.d_bound, row.slack
            )));
        }
    }
    Ok(())
}

fn plot(cfg: &RunConfig, runs: &[CurveRun]) -> Plot {
    let mut series = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let pts = |f: fn(&mrpi_core::mrpi::ErrorRow) -> f64| run.curve.rows.iter().map(|r| (r.n as f64, f(r))).collect();
        series.push(Series::new(format!("n={} sampled", run.dim), pts(|r| r.d_num), Style::Solid, i));
        series.push(Series::new(format!("n={} bound", run.dim), pts(|r| r.d_bound), Style::Dashed, i));
    }
    Plot {
        title: format!("Truncation error vs. bound ({} norm, seed {})", cfg.norm, cfg.seed),
        x_label: "N".into(),
        y_label: "Hausdorff distance".into(),
        log_y: true,
        series,
    }
}

/// Computes, checks soundness, then writes CSVs, SVG and manifest.
pub fn run(cfg: &RunConfig) -> anyhow::Result<Vec<CurveRun>> {
    let runs = compute(cfg)?;
    check_soundness(&runs)?;

    let mut meta = Vec::new();
    for run in &runs {
        let d = run.dim;
        meta.push((format!("dim{d}.norm_id"), run.report.norm.label().to_string()));
        meta.push((format!("dim{d}.gamma"), run.report.gamma.to_string()));
        meta.push((format!("dim{d}.rho"), run.report.rho.to_string()));
    }
    write_manifest(cfg, &meta)?;
    let mut summary = String::from("dim,gamma,rho,r_w,slope,ln_gamma\n");
    for run in &runs {
        write_output(&cfg.output_dir, &format!("curve_dim{}.csv", run.dim), &run.curve.to_csv())?;
        let r_w = run.curve.rows.first().map_or(0.0, |r| r.r_w);
        let slope = run.slope.map_or(String::new(), |s| s.to_string());
        summary.push_str(&format!("{},{},{},{},{},{}\n", run.dim, run.report.gamma, run.report.rho, r_w, slope, run.report.gamma.ln()));
    }
    write_output(&cfg.output_dir, "summary.csv", &summary)?;
    write_output(&cfg.output_dir, "curves.svg", &plot(cfg, &runs).render())?;
    Ok(runs)
}

pub fn print_report(runs: &[CurveRun]) {
    for run in runs {
        let rows = &run.curve.rows;
        let worst = rows.iter().map(|r| r.d_num / (r.d_bound + r.slack)).fold(0.0, f64::max);
        println!(
            "dim {:>2}: norm {} gamma {:.6} rho {:.6}, {} rows sound, max d_num/bound {:.4}",
            run.dim,
            run.report.norm.label(),
            run.report.gamma,
            run.report.rho,
            rows.len(),
            worst
        );
        match (run.slope, run.slope_deviation()) {
            (Some(s), Some(dev)) => println!(
                "        decay slope {:.5} vs ln gamma {:.5}: relative deviation {:.3} ({})",
                s,
                run.report.gamma.ln(),
                dev,
                if dev <= 0.1 { "within 10%" } else { "outside 10%" }
            ),
            _ => println!("        decay slope: not enough rows above the numeric floor"),
        }
    }
}
