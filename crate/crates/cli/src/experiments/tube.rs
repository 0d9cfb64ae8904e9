//! exp4: baseline and certified tube MPC on the double integrator.

use mrpi_core::bound::invariance_excess;
use mrpi_core::linalg::{dot, Matrix};
use mrpi_core::norms::ContractionReport;
use mrpi_core::sets::{sample_unit_directions, BoxSet, OuterSet};
use mrpi_core::tubempc::{
    dlqr, feasible_set_report, simulate_closed_loop, FeasibleReport, LqrGain, Method, MpcConfig, Plant, SimConfig,
    TrajectoryLog, TubeContext, TubeDesign, TubeRegistry,
};

use super::{shape, write_manifest, write_output};
use crate::config::RunConfig;
use crate::failure::invariant;
use crate::svg::{Plot, Series, Style};

pub const X_HALF: f64 = 2.0;
pub const W_HALF: f64 = 0.05;
pub const U_HALF: f64 = 1.0;
pub const X0: [f64; 2] = [-1.0, 0.5];
pub const DOMINANCE_TOL: f64 = 1e-9;
pub const RPI_TOL: f64 = 1e-9;
/// Rollouts drawn in each trajectory plot.
const PLOTTED_ROLLOUTS: usize = 10;

pub struct Setup {
    pub plant: Plant,
    pub lqr: LqrGain,
    pub a_cl: Matrix,
    pub x: BoxSet,
    pub u: BoxSet,
    pub w: BoxSet,
    pub mpc: MpcConfig,
}

impl Setup {
    pub fn new(horizon: usize) -> anyhow::Result<Self> {
        let plant = Plant::double_integrator();
        let lqr = dlqr(&plant, &Matrix::identity(2), &Matrix::identity(1))?;
        let a_cl = plant.closed_loop(&lqr.k)?;
        let mpc = MpcConfig {
            q: Matrix::identity(2),
            r: Matrix::identity(1),
            terminal: Some(lqr.p.clone()),
            horizon,
        };
        Ok(Self {
            plant,
            lqr,
            a_cl,
            x: BoxSet::cube(2, -X_HALF, X_HALF)?,
            u: BoxSet::cube(1, -U_HALF, U_HALF)?,
            w: BoxSet::cube(2, -W_HALF, W_HALF)?,
            mpc,
        })
    }
}

pub struct MethodRun {
    pub spec: String,
    pub design: TubeDesign,
    /// Largest `h_{A_cl Z ⊕ W}(u) − h_Z(u)` over the sampled directions.
    pub rpi_excess: f64,
    pub logs: Vec<TrajectoryLog>,
}

impl MethodRun {
    pub fn violations(&self) -> usize {
        self.logs.iter().map(|l| l.violations).sum()
    }

    pub fn input_violations(&self) -> usize {
        self.logs.iter().map(|l| l.input_violations).sum()
    }

    pub fn tube_exits(&self) -> usize {
        self.logs.iter().map(|l| l.tube_exits).sum()
    }
}

pub struct TubeRun {
    pub setup: Setup,
    pub report: ContractionReport,
    pub methods: Vec<MethodRun>,
    pub feasible: FeasibleReport,
}

impl TubeRun {
    pub fn method(&self, m: Method) -> Option<&MethodRun> {
        self.methods.iter().find(|r| r.design.method == m)
    }
}

pub fn compute(cfg: &RunConfig) -> anyhow::Result<TubeRun> {
    let setup = Setup::new(cfg.horizon)?;
    let report = shape(&cfg.norm, &setup.a_cl)?;
    let ctx = TubeContext { a_cl: setup.a_cl.clone(), w: setup.w.clone(), norm: report.norm.clone(), epsilon: cfg.epsilon };
    let registry = TubeRegistry::default();
    let dirs = sample_unit_directions(2, cfg.dir_count, cfg.seed);
    let sim = SimConfig {
        steps: cfg.steps,
        rollouts: cfg.rollouts,
        seed: cfg.seed,
        x0: X0.to_vec(),
        x_bounds: setup.x.clone(),
        u_bounds: setup.u.clone(),
        containment_dirs: cfg.dir_count,
    };

    let mut methods = Vec::new();
    let mut frags = Vec::new();
    for spec in &cfg.methods {
        let frag = registry.create(spec)?.build(&ctx)?;
        frags.push((spec.clone(), frag.clone()));
        let design = TubeDesign::assemble(&setup.lqr.k, &setup.a_cl, frag, &setup.x, &setup.u)?;
        let rpi_excess = invariance_excess(&setup.a_cl, &setup.w, &design.cross_section, &dirs)?;
        let logs = simulate_closed_loop(&setup.plant, &design, &setup.mpc, &setup.w, &sim)?;
        methods.push(MethodRun { spec: spec.clone(), design, rpi_excess, logs });
    }
    let feasible = feasible_set_report(&setup.x, &frags)?;
    Ok(TubeRun { setup, report, methods, feasible })
}

pub fn check(run: &TubeRun) -> anyhow::Result<()> {
    for m in &run.methods {
        if m.rpi_excess > RPI_TOL {
            return Err(invariant(format!("{}: cross-section fails the invariance test by {}", m.spec, m.rpi_excess)));
        }
        let (v, iv, exits) = (m.violations(), m.input_violations(), m.tube_exits());
        if v + iv + exits > 0 {
            return Err(invariant(format!(
                "{}: {v} state violations, {iv} input violations, {exits} tube exits",
                m.spec
            )));
        }
    }
    if let (Some(b), Some(c)) = (run.method(Method::Baseline), run.method(Method::Certified)) {
        let (be, ce) = (b.design.cross_section.axis_extents(), c.design.cross_section.axis_extents());
        if let Some(axis) = (0..be.len()).find(|&j| ce[j] > be[j] + DOMINANCE_TOL) {
            return Err(invariant(format!("certified reach {} exceeds baseline {} on axis {axis}", ce[axis], be[axis])));
        }
    }
    Ok(())
}

/// Boundary of `Z` traced by support points over `count` directions.
fn outline(z: &OuterSet, center: &[f64], count: usize) -> anyhow::Result<Vec<(f64, f64)>> {
    let factor = z.pad.norm.factor();
    let mut pts = Vec::with_capacity(count);
    for k in 0..count {
        let t = std::f64::consts::TAU * k as f64 / count as f64;
        let u = [t.cos(), t.sin()];
        let mut p = z.core.center().to_vec();
        for g in z.core.generators() {
            let s = dot(g, &u).signum();
            p[0] += s * g[0];
            p[1] += s * g[1];
        }
        let pinv_u = factor.solve(&u)?;
        let scale = z.pad.radius / dot(&u, &pinv_u).sqrt();
        pts.push((center[0] + p[0] + scale * pinv_u[0], center[1] + p[1] + scale * pinv_u[1]));
    }
    Ok(pts)
}

fn rect(b: &BoxSet) -> Vec<(f64, f64)> {
    let (lo, hi) = (b.lower(), b.upper());
    vec![(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])]
}

fn feasible_plot(run: &TubeRun) -> Plot {
    let mut series = vec![Series::new("X", rect(&run.setup.x), Style::Region, 7)];
    for (i, m) in run.methods.iter().enumerate() {
        let label = format!("{} X-Z (vol {:.3})", m.spec, m.design.x_tight.volume());
        series.push(Series::new(label, rect(&m.design.x_tight), Style::Region, i));
    }
    Plot {
        title: "Tightened state constraints".into(),
        x_label: "x1 (position)".into(),
        y_label: "x2 (velocity)".into(),
        log_y: false,
        series,
    }
}

fn trajectory_plot(m: &MethodRun) -> anyhow::Result<Plot> {
    let mut series = Vec::new();
    if let Some(first) = m.logs.first() {
        for (j, r) in first.records.iter().enumerate().step_by(5) {
            let label = if j == 0 { "tube cross-section" } else { "" };
            series.push(Series::new(label, outline(&m.design.cross_section, &r.x_nom, 48)?, Style::Region, 2));
        }
    }
    for (i, log) in m.logs.iter().take(PLOTTED_ROLLOUTS).enumerate() {
        let label = if i == 0 { "real" } else { "" };
        series.push(Series::new(label, log.records.iter().map(|r| (r.x_real[0], r.x_real[1])).collect(), Style::Solid, 0));
    }
    if let Some(first) = m.logs.first() {
        series.push(Series::new("nominal", first.records.iter().map(|r| (r.x_nom[0], r.x_nom[1])).collect(), Style::Dashed, 1));
    }
    Ok(Plot {
        title: format!("Closed-loop trajectories, {} tube", m.spec),
        x_label: "x1 (position)".into(),
        y_label: "x2 (velocity)".into(),
        log_y: false,
        series,
    })
}

fn file_stem(spec: &str) -> String {
    spec.replace(':', "_")
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<TubeRun> {
    let run = compute(cfg)?;
    check(&run)?;

    let mut meta = vec![
        ("plant".to_string(), "double integrator A=[[1,1],[0,1]] B=[0.5,1]".to_string()),
        ("lqr_weights".to_string(), "Q=I R=1".to_string()),
        ("k_gain".to_string(), format!("{:?}", run.setup.lqr.k.as_slice())),
        ("x0".to_string(), format!("{X0:?}")),
        ("norm_id".to_string(), run.report.norm.label().to_string()),
        ("gamma".to_string(), run.report.gamma.to_string()),
    ];
    for m in &run.methods {
        if let Some(cert) = &m.design.cert {
            meta.push((format!("{}.certificate", m.spec), cert.to_kv()));
        }
    }
    write_manifest(cfg, &meta)?;
    write_output(&cfg.output_dir, "feasible.csv", &run.feasible.to_csv())?;
    write_output(&cfg.output_dir, "feasible.svg", &feasible_plot(&run).render())?;
    for m in &run.methods {
        let mut csv = TrajectoryLog::csv_header(2, 1);
        csv.push('\n');
        for log in &m.logs {
            csv.push_str(&log.to_csv_rows());
        }
        let stem = file_stem(&m.spec);
        write_output(&cfg.output_dir, &format!("trajectories_{stem}.csv"), &csv)?;
        write_output(&cfg.output_dir, &format!("trajectories_{stem}.svg"), &trajectory_plot(m)?.render())?;
    }
    Ok(run)
}

pub fn print_report(run: &TubeRun) {
    println!(
        "closed loop: K = {:?}, norm {} gamma {:.6}",
        run.setup.lqr.k.as_slice(),
        run.report.norm.label(),
        run.report.gamma
    );
    for m in &run.methods {
        let n = m.design.cert.as_ref().map_or(String::new(), |c| format!(" N={}", c.n));
        println!(
            "{:<12}{n} reach {:?} x_tight {:?} u_tight {:?} volume {:.4}",
            m.spec,
            m.design.cross_section.axis_extents(),
            m.design.x_tight.half_widths(),
            m.design.u_tight.half_widths(),
            m.design.x_tight.volume()
        );
        println!(
            "{:<12} invariance excess {:.3e}, {} rollouts: {} violations, {} tube exits",
            "",
            m.rpi_excess,
            m.logs.len(),
            m.violations() + m.input_violations(),
            m.tube_exits()
        );
    }
}
