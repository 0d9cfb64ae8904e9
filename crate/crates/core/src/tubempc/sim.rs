use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{solve_nominal_mpc, MpcConfig, Plant, TubeDesign};
use crate::error::{Error, Result};
use crate::norms::vec_norm;
use crate::sets::{sample_unit_directions, BoxSet};

type Path = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub steps: usize,
    pub rollouts: usize,
    /// Rollout `i` draws from seed `seed + i`.
    pub seed: u64,
    pub x0: Vec<f64>,
    /// Original (untightened) constraints the real trajectory is checked against.
    pub x_bounds: BoxSet,
    pub u_bounds: BoxSet,
    /// Random directions, on top of the axes, for the error-in-tube test.
    pub containment_dirs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub x_real: Vec<f64>,
    pub x_nom: Vec<f64>,
    pub u_nom: Vec<f64>,
    pub u_applied: Vec<f64>,
    pub w: Vec<f64>,
    /// `x_real − x_nom`.
    pub error: Vec<f64>,
    pub in_tube: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub rollout: usize,
    pub records: Vec<StepRecord>,
    /// Real states, final one included, outside `X`.
    pub violations: usize,
    pub input_violations: usize,
    /// Errors, final one included, that failed the tube membership test.
    pub tube_exits: usize,
    /// Largest `‖x_real − x_nom‖_P` seen.
    pub max_error_norm: f64,
}

impl TrajectoryLog {
    pub fn csv_header(dim_x: usize, dim_u: usize) -> String {
        let mut cols = vec!["rollout".to_string(), "k".to_string()];
        cols.extend((0..dim_x).map(|i| format!("x_real_{i}")));
        cols.extend((0..dim_x).map(|i| format!("x_nom_{i}")));
        cols.extend((0..dim_u).map(|i| format!("u_nom_{i}")));
        cols.extend((0..dim_u).map(|i| format!("u_applied_{i}")));
        cols.extend((0..dim_x).map(|i| format!("w_{i}")));
        cols.join(",")
    }

    /// Rows only, no header.
    pub fn to_csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let mut fields = vec![self.rollout.to_string(), r.k.to_string()];
            for v in r.x_real.iter().chain(&r.x_nom).chain(&r.u_nom).chain(&r.u_applied).chain(&r.w) {
                fields.push(v.to_string());
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Nominal states `x_0 … x_T` and inputs `u_0 … u_{T−1}` from receding-horizon
/// MPC on the disturbance-free model.
fn nominal_trajectory(
    plant: &Plant,
    design: &TubeDesign,
    mpc: &MpcConfig,
    x0: &[f64],
    steps: usize,
) -> Result<(Path, Path)> {
    let mut xs = vec![x0.to_vec()];
    let mut us = Vec::with_capacity(steps);
    for k in 0..steps {
        let plan = solve_nominal_mpc(plant, &design.k_gain, mpc, &design.x_tight, &design.u_tight, &xs[k])?;
        let u = plan.first_input().to_vec();
        xs.push(plant.step(&xs[k], &u, &vec![0.0; xs[k].len()])?);
        us.push(u);
    }
    Ok((xs, us))
}

/// Monte-Carlo tube MPC: one shared nominal trajectory, independent
/// disturbance sequences per rollout, `u = u_nom + K (x_real − x_nom)`.
pub fn simulate_closed_loop(
    plant: &Plant,
    design: &TubeDesign,
    mpc: &MpcConfig,
    w: &BoxSet,
    cfg: &SimConfig,
) -> Result<Vec<TrajectoryLog>> {
    let n = plant.dim_x();
    if w.dim() != n || cfg.x_bounds.dim() != n || cfg.x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.dim() });
    }
    let (x_nom, u_nom) = nominal_trajectory(plant, design, mpc, &cfg.x0, cfg.steps)?;
    let dirs = sample_unit_directions(n, cfg.containment_dirs, cfg.seed);
    let z = &design.cross_section;
    let norm = &z.pad.norm;
    let samplers = w
        .lower()
        .iter()
        .zip(w.upper())
        .map(|(&lo, hi)| Uniform::new_inclusive(lo, hi).map_err(|e| Error::InvalidBox(e.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let mut logs = Vec::with_capacity(cfg.rollouts);
    for rollout in 0..cfg.rollouts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(rollout as u64));
        let mut log = TrajectoryLog {
            rollout,
            records: Vec::with_capacity(cfg.steps),
            violations: 0,
            input_violations: 0,
            tube_exits: 0,
            max_error_norm: 0.0,
        };
        let mut x = cfg.x0.clone();
        for k in 0..=cfg.steps {
            let error: Vec<f64> = x.iter().zip(&x_nom[k]).map(|(a, b)| a - b).collect();
            let in_tube = z.contains_by_support(&error, &dirs, 1e-9)?;
            log.violations += usize::from(!cfg.x_bounds.contains(&x, 0.0));
            log.tube_exits += usize::from(!in_tube);
            log.max_error_norm = log.max_error_norm.max(vec_norm(&error, norm)?);
            if k == cfg.steps {
                break;
            }
            let correction = design.k_gain.matvec(&error)?;
            let u_applied: Vec<f64> = u_nom[k].iter().zip(&correction).map(|(a, b)| a + b).collect();
            log.input_violations += usize::from(!cfg.u_bounds.contains(&u_applied, 0.0));
            let wk: Vec<f64> = samplers.iter().map(|s| s.sample(&mut rng)).collect();
            let next = plant.step(&x, &u_applied, &wk)?;
            log.records.push(StepRecord {
                k,
                x_real: x,
                x_nom: x_nom[k].clone(),
                u_nom: u_nom[k].clone(),
                u_applied,
                w: wk,
                error,
                in_tube,
            });
            x = next;
        }
        logs.push(log);
    }
    Ok(logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::norms::lyapunov_norm;
    use crate::tubempc::{certified_tube, dlqr};

    fn setup(w: &BoxSet) -> (Plant, TubeDesign, MpcConfig, SimConfig) {
        let plant = Plant::double_integrator();
        let lqr = dlqr(&plant, &Matrix::identity(2), &Matrix::identity(1)).unwrap();
        let a_cl = plant.closed_loop(&lqr.k).unwrap();
        let norm = lyapunov_norm(&a_cl).unwrap().norm;
        let frag = certified_tube(&a_cl, w, &norm, 8).unwrap();
        let x = BoxSet::cube(2, -2.0, 2.0).unwrap();
        let u = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let design = TubeDesign::assemble(&lqr.k, &a_cl, frag, &x, &u).unwrap();
        let mut mpc = MpcConfig::new(Matrix::identity(2), Matrix::identity(1));
        mpc.terminal = Some(lqr.p);
        let cfg = SimConfig {
            steps: 20,
            rollouts: 3,
            seed: 5,
            x0: vec![-1.0, 0.5],
            x_bounds: x,
            u_bounds: u,
            containment_dirs: 100,
        };
        (plant, design, mpc, cfg)
    }

    #[test]
    fn no_disturbance_means_no_error() {
        let w = BoxSet::symmetric(vec![0.0, 0.0]).unwrap();
        let (plant, design, mpc, cfg) = setup(&w);
        for log in simulate_closed_loop(&plant, &design, &mpc, &w, &cfg).unwrap() {
            assert!(log.records.iter().all(|r| r.error.iter().all(|e| *e == 0.0) && r.x_real == r.x_nom));
            assert_eq!(log.violations, 0);
        }
    }

    #[test]
    fn feedback_identity_and_containment() {
        let w = BoxSet::symmetric(vec![0.05, 0.05]).unwrap();
        let (plant, design, mpc, cfg) = setup(&w);
        let logs = simulate_closed_loop(&plant, &design, &mpc, &w, &cfg).unwrap();
        assert_eq!(logs.len(), 3);
        for log in &logs {
            assert_eq!(log.records.len(), 20);
            assert_eq!((log.violations, log.tube_exits), (0, 0));
            for r in &log.records {
                let ke = design.k_gain.matvec(&r.error).unwrap();
                assert_eq!(r.u_applied[0] - r.u_nom[0], ke[0] + r.u_nom[0] - r.u_nom[0]);
                assert!(w.contains(&r.w, 0.0));
            }
        }
        assert_ne!(logs[0].records[0].w, logs[1].records[0].w);
        assert_eq!(logs, simulate_closed_loop(&plant, &design, &mpc, &w, &cfg).unwrap());
    }
}
