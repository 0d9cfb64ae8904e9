use super::Plant;
use crate::error::{Error, Result};
use crate::linalg::{solve_qp, Matrix};
use crate::sets::BoxSet;

#[derive(Debug, Clone, PartialEq)]
pub struct MpcConfig {
    pub q: Matrix,
    pub r: Matrix,
    /// Terminal weight; `Q` when absent.
    pub terminal: Option<Matrix>,
    pub horizon: usize,
}

impl MpcConfig {
    pub fn new(q: Matrix, r: Matrix) -> Self {
        Self { q, r, terminal: None, horizon: 10 }
    }
}

/// Optimal nominal plan over the horizon, with `u_k = K x_k + v_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NominalPlan {
    pub v: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    /// `x_0 … x_H`.
    pub states: Vec<Vec<f64>>,
    /// Common bound `|v_k| ≤ β` that keeps every prediction in the boxes.
    pub v_bound: f64,
}

impl NominalPlan {
    pub fn first_input(&self) -> &[f64] {
        &self.inputs[0]
    }
}

fn write_block(dst: &mut Matrix, r0: usize, c0: usize, src: &Matrix) {
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            dst[(r0 + i, c0 + j)] = src[(i, j)];
        }
    }
}

fn abs_row_sums(m: &Matrix) -> Vec<f64> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|v| v.abs()).sum()).collect()
}

/// Largest `β ≥ 0` with `center ± β·reach` inside `[lo, hi]`, or `None` when
/// `center` itself lies outside.
fn box_margin(center: &[f64], reach: &[f64], b: &BoxSet) -> Option<f64> {
    let (lo, hi) = (b.lower(), b.upper());
    let mut beta = f64::INFINITY;
    for i in 0..center.len() {
        let slack = (hi[i] - center[i]).min(center[i] - lo[i]);
        if slack < -1e-12 {
            return None;
        }
        if reach[i] > 0.0 {
            beta = beta.min(slack.max(0.0) / reach[i]);
        }
    }
    Some(beta)
}

/// Condensed nominal MPC as a box-constrained QP in `v`.
///
/// State and input boxes are enforced conservatively: every `v_k` gets the
/// same bound `β`, chosen by interval propagation so that any `v` in the box
/// keeps all predicted states and inputs feasible.
pub fn solve_nominal_mpc(
    plant: &Plant,
    k: &Matrix,
    cfg: &MpcConfig,
    x_tight: &BoxSet,
    u_tight: &BoxSet,
    x0: &[f64],
) -> Result<NominalPlan> {
    let (n, m, h) = (plant.dim_x(), plant.dim_u(), cfg.horizon);
    if h == 0 {
        return Err(Error::InvalidArgument("MPC horizon must be at least 1".into()));
    }
    if x0.len() != n || x_tight.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
    }
    if k.rows() != m || k.cols() != n || u_tight.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, found: k.rows() });
    }
    if !x_tight.contains(x0, 1e-12) {
        return Err(Error::InfeasibleTightening(format!("initial state {x0:?} lies outside the tightened state box")));
    }
    let a_cl = plant.closed_loop(k)?;
    let terminal = cfg.terminal.as_ref().unwrap_or(&cfg.q);

    // x_k = A_clᵏ x0 + Σ_{j<k} A_cl^{k−1−j} B v_j for k = 0..H
    let mut free = vec![x0.to_vec()];
    for i in 0..h {
        free.push(a_cl.matvec(&free[i])?);
    }
    let mut pulse = vec![plant.b.clone()]; // A_clⁱ B
    for i in 1..h {
        pulse.push(a_cl.matmul(&pulse[i - 1])?);
    }
    let mut gamma = Matrix::zeros((h + 1) * n, h * m);
    for kk in 1..=h {
        for j in 0..kk {
            write_block(&mut gamma, kk * n, j * m, &pulse[kk - 1 - j]);
        }
    }

    let mut beta = f64::INFINITY;
    for kk in 0..=h {
        let mut x_reach = vec![0.0; n];
        let mut u_reach = vec![1.0; m];
        for j in 0..kk {
            let p = &pulse[kk - 1 - j];
            for (acc, s) in x_reach.iter_mut().zip(abs_row_sums(p)) {
                *acc += s;
            }
            for (acc, s) in u_reach.iter_mut().zip(abs_row_sums(&k.matmul(p)?)) {
                *acc += s;
            }
        }
        let mut step = |center: &[f64], reach: &[f64], b: &BoxSet, what: &str| -> Result<()> {
            match box_margin(center, reach, b) {
                Some(bm) => {
                    beta = beta.min(bm);
                    Ok(())
                }
                None => Err(Error::InfeasibleTightening(format!("free {what} response leaves its box at step {kk}"))),
            }
        };
        if kk > 0 {
            step(&free[kk], &x_reach, x_tight, "state")?;
        }
        if kk < h {
            step(&k.matvec(&free[kk])?, &u_reach, u_tight, "input")?;
        }
    }

    // cost Σ_{k<H} xᵀQx + uᵀRu + x_Hᵀ P_f x_H with U = S V + ū
    let mut qt = Matrix::zeros((h + 1) * n, (h + 1) * n);
    for kk in 0..h {
        write_block(&mut qt, kk * n, kk * n, &cfg.q);
    }
    write_block(&mut qt, h * n, h * n, terminal);
    let mut rt = Matrix::zeros(h * m, h * m);
    let mut kb = Matrix::zeros(h * m, (h + 1) * n);
    for kk in 0..h {
        write_block(&mut rt, kk * m, kk * m, &cfg.r);
        write_block(&mut kb, kk * m, kk * n, k);
    }
    let xbar: Vec<f64> = free.concat();
    let s = kb.matmul(&gamma)?.add(&Matrix::identity(h * m))?;
    let ubar = kb.matvec(&xbar)?;

    let gt = gamma.transpose();
    let st = s.transpose();
    let hess = gt.matmul(&qt)?.matmul(&gamma)?.add(&st.matmul(&rt)?.matmul(&s)?)?.scale(2.0).symmetrized();
    let grad: Vec<f64> = gt
        .matvec(&qt.matvec(&xbar)?)?
        .iter()
        .zip(st.matvec(&rt.matvec(&ubar)?)?)
        .map(|(a, b)| 2.0 * (a + b))
        .collect();
    let bound = beta.min(1e6);
    let z = solve_qp(&hess, &grad, &vec![-bound; h * m], &vec![bound; h * m])?;

    let xs = gamma.matvec(&z)?.iter().zip(&xbar).map(|(a, b)| a + b).collect::<Vec<_>>();
    let us = s.matvec(&z)?.iter().zip(&ubar).map(|(a, b)| a + b).collect::<Vec<_>>();
    Ok(NominalPlan {
        v: z.chunks(m).map(<[f64]>::to_vec).collect(),
        inputs: us.chunks(m).map(<[f64]>::to_vec).collect(),
        states: xs.chunks(n).map(<[f64]>::to_vec).collect(),
        v_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_stays_put() {
        let plant = Plant::double_integrator();
        let k = Matrix::from_rows(&[[-0.4, -1.0]]);
        let cfg = MpcConfig::new(Matrix::identity(2), Matrix::identity(1));
        let x = BoxSet::cube(2, -2.0, 2.0).unwrap();
        let u = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let plan = solve_nominal_mpc(&plant, &k, &cfg, &x, &u, &[0.0, 0.0]).unwrap();
        assert!(plan.v.iter().flatten().all(|v| *v == 0.0));
        assert!(plan.states.iter().flatten().all(|v| *v == 0.0));
        assert_eq!(plan.states.len(), 11);
    }

    #[test]
    fn scalar_one_step_closed_form() {
        let (a, b, q, r, p, x0) = (1.2, 0.7, 1.0, 0.3, 2.5, 0.4);
        let plant = Plant::new(Matrix::from_rows(&[[a]]), Matrix::from_rows(&[[b]])).unwrap();
        let cfg = MpcConfig {
            q: Matrix::from_rows(&[[q]]),
            r: Matrix::from_rows(&[[r]]),
            terminal: Some(Matrix::from_rows(&[[p]])),
            horizon: 1,
        };
        let big = BoxSet::cube(1, -100.0, 100.0).unwrap();
        let plan = solve_nominal_mpc(&plant, &Matrix::zeros(1, 1), &cfg, &big, &big, &[x0]).unwrap();
        let expected = -p * a * b * x0 / (r + p * b * b);
        assert!((plan.first_input()[0] - expected).abs() < 1e-8);
        assert!((plan.states[1][0] - (a * x0 + b * expected)).abs() < 1e-8);
    }

    #[test]
    fn start_outside_box_is_rejected() {
        let plant = Plant::double_integrator();
        let cfg = MpcConfig::new(Matrix::identity(2), Matrix::identity(1));
        let x = BoxSet::cube(2, -1.0, 1.0).unwrap();
        let u = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let err = solve_nominal_mpc(&plant, &Matrix::zeros(1, 2), &cfg, &x, &u, &[1.5, 0.0]).unwrap_err();
        assert!(matches!(err, Error::InfeasibleTightening(_)));
    }
}
