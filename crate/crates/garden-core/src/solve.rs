//! Numerical discovery of representations: minimize the polynomial cost
//! over matrix entries with a damped Gauss-Newton (Levenberg-Marquardt)
//! iteration, optionally holding a masked subset of entries fixed, then
//! round candidate minima onto exact signed-permutation tuples.
//!
//! The cost is literally [`garden_residual`] over `f64`; there is one
//! definition of the objective in the crate. Runs are deterministic for a
//! given problem (seed included), and damping only ever accepts strictly
//! improving steps, so the recorded cost trace is non-increasing.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{decompose_sp, garden_residual, GardenRep};
use crate::mat::Mat;
use crate::perm::SignedPermutation;

/// Objective value of a candidate representation. Identical to
/// [`garden_residual`]; the alias exists because the solver speaks in
/// terms of a cost function.
pub fn cost(rep: &GardenRep<f64>) -> f64 {
    garden_residual(rep)
}

/// Gradient of [`cost`] with respect to every entry of every `L_I` and
/// `R_I`. Entries held fixed by a mask still get their slot; the
/// minimizer simply never applies them.
#[derive(Clone, Debug, PartialEq)]
pub struct CostGradient {
    pub l: Vec<Mat<f64>>,
    pub r: Vec<Mat<f64>>,
}

pub fn cost_gradient(rep: &GardenRep<f64>) -> CostGradient {
    let n = rep.n_colors();
    let d = rep.dim();
    let mut grad_l = vec![Mat::<f64>::zeros(d, d); n];
    let mut grad_r = vec![Mat::<f64>::zeros(d, d); n];
    for i in 0..n {
        for j in i..n {
            let (a, b) = relation_residuals(rep, i, j);
            // d/dL_I ||A||^2 = 2 A R_J^T, d/dL_J ||A||^2 = 2 A R_I^T
            grad_l[i] = grad_l[i].add(&a.mul(&rep.r(j).transpose()).scale(&2.0));
            grad_l[j] = grad_l[j].add(&a.mul(&rep.r(i).transpose()).scale(&2.0));
            // d/dL_J ||B||^2 = 2 R_I^T B, d/dL_I ||B||^2 = 2 R_J^T B
            grad_l[j] = grad_l[j].add(&rep.r(i).transpose().mul(&b).scale(&2.0));
            grad_l[i] = grad_l[i].add(&rep.r(j).transpose().mul(&b).scale(&2.0));
            // d/dR_J ||A||^2 = 2 L_I^T A, d/dR_I ||A||^2 = 2 L_J^T A
            grad_r[j] = grad_r[j].add(&rep.l(i).transpose().mul(&a).scale(&2.0));
            grad_r[i] = grad_r[i].add(&rep.l(j).transpose().mul(&a).scale(&2.0));
            // d/dR_I ||B||^2 = 2 B L_J^T, d/dR_J ||B||^2 = 2 B L_I^T
            grad_r[i] = grad_r[i].add(&b.mul(&rep.l(j).transpose()).scale(&2.0));
            grad_r[j] = grad_r[j].add(&b.mul(&rep.l(i).transpose()).scale(&2.0));
        }
    }
    CostGradient {
        l: grad_l,
        r: grad_r,
    }
}

/// `(L_I R_J + L_J R_I - 2 delta, R_I L_J + R_J L_I - 2 delta)`.
fn relation_residuals(rep: &GardenRep<f64>, i: usize, j: usize) -> (Mat<f64>, Mat<f64>) {
    let d = rep.dim();
    let target = if i == j {
        Mat::<f64>::identity(d).scale(&2.0)
    } else {
        Mat::<f64>::zeros(d, d)
    };
    let a = rep.l(i).mul(rep.r(j)).add(&rep.l(j).mul(rep.r(i))).sub(&target);
    let b = rep.r(i).mul(rep.l(j)).add(&rep.r(j).mul(rep.l(i))).sub(&target);
    (a, b)
}

/// Fixed-entry grids for the masked (auxiliary-field style) problem.
/// `true` in a free grid means the entry is optimized; fixed entries take
/// their value from the value grids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mask {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    #[serde(rename = "L")]
    pub l: Vec<Mat<f64>>,
    #[serde(rename = "R")]
    pub r: Vec<Mat<f64>>,
    #[serde(rename = "free_L")]
    pub free_l: Vec<Mat<bool>>,
    #[serde(rename = "free_R")]
    pub free_r: Vec<Mat<bool>>,
}

impl Mask {
    /// Fixes every entry of `L` to a known tuple and frees all of `R`.
    pub fn fix_l_free_r(l: &[Mat<f64>]) -> Mask {
        let n = l.len();
        let d = l[0].rows();
        Mask {
            n,
            d,
            l: l.to_vec(),
            r: vec![Mat::zeros(d, d); n],
            free_l: vec![Mat::from_fn(d, d, |_, _| false); n],
            free_r: vec![Mat::from_fn(d, d, |_, _| true); n],
        }
    }

    fn validate(&self, n: usize, d: usize) -> Result<(), String> {
        let shape_ok = |mats: &[Mat<f64>]| {
            mats.len() == n && mats.iter().all(|m| m.rows() == d && m.cols() == d)
        };
        let flags_ok = |mats: &[Mat<bool>]| {
            mats.len() == n && mats.iter().all(|m| m.rows() == d && m.cols() == d)
        };
        if self.n != n || self.d != d {
            return Err(format!(
                "mask is for N={}, d={}, problem is N={n}, d={d}",
                self.n, self.d
            ));
        }
        if !shape_ok(&self.l) || !shape_ok(&self.r) || !flags_ok(&self.free_l)
            || !flags_ok(&self.free_r)
        {
            return Err("mask grids do not match the declared N and d".into());
        }
        Ok(())
    }
}

/// Stopping and damping knobs; defaults match the documented solver
/// contract.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub cost_threshold: f64,
    pub max_iterations: usize,
    pub damping_init: f64,
    pub damping_grow: f64,
    pub damping_shrink: f64,
    /// Entrywise tolerance used when rounding the final iterate onto a
    /// signed-permutation tuple.
    pub round_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            cost_threshold: 1e-18,
            max_iterations: 10_000,
            damping_init: 1e-3,
            damping_grow: 10.0,
            damping_shrink: 0.3,
            round_tol: 1e-6,
        }
    }
}

/// One minimization task: dimensions, optional mask, seed, stop criteria.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveProblem {
    pub n_colors: usize,
    pub dim: usize,
    pub mask: Option<Mask>,
    pub seed: u64,
    #[serde(default)]
    pub settings: SolverSettings,
}

impl SolveProblem {
    pub fn free(n_colors: usize, dim: usize, seed: u64) -> SolveProblem {
        SolveProblem {
            n_colors,
            dim,
            mask: None,
            seed,
            settings: SolverSettings::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CostThreshold,
    MaxIterations,
    Stalled,
}

/// Outcome of one [`minimize`] run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub seed: u64,
    pub final_cost: f64,
    /// Accepted iterations.
    pub iterations: usize,
    pub stop: StopReason,
    pub iterate: GardenRep<f64>,
    /// Exact signed-permutation tuple the iterate rounds to, if any;
    /// `verified` is true only when its residual is exactly zero.
    pub rounded: Option<GardenRep<i64>>,
    pub verified: bool,
    /// Cost after the initial point and after each accepted step.
    pub trace: Vec<f64>,
    pub settings: SolverSettings,
}

#[derive(Clone, Copy)]
enum Side {
    L,
    R,
}

#[derive(Clone, Copy)]
struct Param {
    side: Side,
    color: usize,
    row: usize,
    col: usize,
}

struct Workspace {
    d: usize,
    params: Vec<Param>,
    pairs: Vec<(usize, usize)>,
}

impl Workspace {
    fn residual_len(&self) -> usize {
        self.pairs.len() * 2 * self.d * self.d
    }

    fn residual_vector(&self, rep: &GardenRep<f64>) -> DVector<f64> {
        let d = self.d;
        let mut r = DVector::zeros(self.residual_len());
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let (a, b) = relation_residuals(rep, i, j);
            let base = p * 2 * d * d;
            for x in 0..d {
                for y in 0..d {
                    r[base + x * d + y] = a[(x, y)];
                    r[base + d * d + x * d + y] = b[(x, y)];
                }
            }
        }
        r
    }

    /// Analytic Jacobian of the residual vector in the free parameters.
    fn jacobian(&self, rep: &GardenRep<f64>) -> DMatrix<f64> {
        let d = self.d;
        let mut jac = DMatrix::zeros(self.residual_len(), self.params.len());
        for (col_idx, param) in self.params.iter().enumerate() {
            for (p, &(i, j)) in self.pairs.iter().enumerate() {
                let a_base = p * 2 * d * d;
                let b_base = a_base + d * d;
                let (pr, pc, k) = (param.row, param.col, param.color);
                match param.side {
                    Side::L => {
                        // A_{pr,b} += (R_other)_{pc,b}; B_{a,pc} += (R_other)_{a,pr}
                        if k == i {
                            for b in 0..d {
                                jac[(a_base + pr * d + b, col_idx)] += rep.r(j)[(pc, b)];
                            }
                            for a in 0..d {
                                jac[(b_base + a * d + pc, col_idx)] += rep.r(j)[(a, pr)];
                            }
                        }
                        if k == j {
                            for b in 0..d {
                                jac[(a_base + pr * d + b, col_idx)] += rep.r(i)[(pc, b)];
                            }
                            for a in 0..d {
                                jac[(b_base + a * d + pc, col_idx)] += rep.r(i)[(a, pr)];
                            }
                        }
                    }
                    Side::R => {
                        // A_{a,pc} += (L_other)_{a,pr}; B_{pr,b} += (L_other)_{pc,b}
                        if k == j {
                            for a in 0..d {
                                jac[(a_base + a * d + pc, col_idx)] += rep.l(i)[(a, pr)];
                            }
                            for b in 0..d {
                                jac[(b_base + pr * d + b, col_idx)] += rep.l(i)[(pc, b)];
                            }
                        }
                        if k == i {
                            for a in 0..d {
                                jac[(a_base + a * d + pc, col_idx)] += rep.l(j)[(a, pr)];
                            }
                            for b in 0..d {
                                jac[(b_base + pr * d + b, col_idx)] += rep.l(j)[(pc, b)];
                            }
                        }
                    }
                }
            }
        }
        jac
    }
}

fn set_param(l: &mut [Mat<f64>], r: &mut [Mat<f64>], p: &Param, value: f64) {
    match p.side {
        Side::L => l[p.color][(p.row, p.col)] = value,
        Side::R => r[p.color][(p.row, p.col)] = value,
    }
}

fn get_param(rep: &GardenRep<f64>, p: &Param) -> f64 {
    match p.side {
        Side::L => rep.l(p.color)[(p.row, p.col)],
        Side::R => rep.r(p.color)[(p.row, p.col)],
    }
}

fn rep_from_mats(l: Vec<Mat<f64>>, r: Vec<Mat<f64>>) -> GardenRep<f64> {
    GardenRep::new(l, r).expect("solver matrices share one shape")
}

/// Runs the damped Gauss-Newton minimization described in the module
/// docs. Non-convergence is an outcome (`verified = false`), never an
/// error. Panics only if a mask disagrees with the problem dimensions.
pub fn minimize(problem: &SolveProblem) -> SolveReport {
    let n = problem.n_colors;
    let d = problem.dim;
    let settings = problem.settings;
    if let Some(mask) = &problem.mask {
        if let Err(msg) = mask.validate(n, d) {
            panic!("invalid mask: {msg}");
        }
    }

    // parameter list and initial point
    let mut params = Vec::new();
    let mut l = vec![Mat::<f64>::zeros(d, d); n];
    let mut r = vec![Mat::<f64>::zeros(d, d); n];
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let init = Uniform::new_inclusive(-1.0, 1.0);
    for color in 0..n {
        for row in 0..d {
            for col in 0..d {
                for side in [Side::L, Side::R] {
                    let free = match (&problem.mask, side) {
                        (None, _) => true,
                        (Some(m), Side::L) => m.free_l[color][(row, col)],
                        (Some(m), Side::R) => m.free_r[color][(row, col)],
                    };
                    let value = if free {
                        init.sample(&mut rng)
                    } else {
                        match side {
                            Side::L => problem.mask.as_ref().unwrap().l[color][(row, col)],
                            Side::R => problem.mask.as_ref().unwrap().r[color][(row, col)],
                        }
                    };
                    set_param(
                        &mut l,
                        &mut r,
                        &Param {
                            side,
                            color,
                            row,
                            col,
                        },
                        value,
                    );
                    if free {
                        params.push(Param {
                            side,
                            color,
                            row,
                            col,
                        });
                    }
                }
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let ws = Workspace { d, params, pairs };

    let mut rep = rep_from_mats(l, r);
    let mut current_cost = cost(&rep);
    let mut trace = vec![current_cost];
    let mut lambda = settings.damping_init;
    let mut iterations = 0usize;
    let stop;

    const LAMBDA_MAX: f64 = 1e12;
    const GRAD_STALL: f64 = 1e-14;

    loop {
        if current_cost <= settings.cost_threshold {
            stop = StopReason::CostThreshold;
            break;
        }
        if iterations >= settings.max_iterations {
            stop = StopReason::MaxIterations;
            break;
        }
        if ws.params.is_empty() {
            stop = StopReason::Stalled;
            break;
        }

        let residual = ws.residual_vector(&rep);
        let jac = ws.jacobian(&rep);
        let grad = jac.tr_mul(&residual);
        if grad.amax() < GRAD_STALL {
            stop = StopReason::Stalled;
            break;
        }
        let jtj = jac.tr_mul(&jac);

        // damped Gauss-Newton step, growing lambda until it improves
        let mut accepted = false;
        while lambda <= LAMBDA_MAX {
            let mut system = jtj.clone();
            for k in 0..system.nrows() {
                system[(k, k)] += lambda;
            }
            if let Some(chol) = Cholesky::new(system) {
                let step = chol.solve(&(-&grad));
                let trial = step_rep(&rep, &ws, &step);
                let trial_cost = cost(&trial);
                if trial_cost < current_cost {
                    rep = trial;
                    current_cost = trial_cost;
                    trace.push(current_cost);
                    iterations += 1;
                    lambda = (lambda * settings.damping_shrink).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= settings.damping_grow;
        }
        if accepted {
            continue;
        }

        // steepest-descent fallback with halving line search
        let gnorm_sq = grad.norm_squared();
        let mut alpha = current_cost / gnorm_sq.max(f64::MIN_POSITIVE);
        let mut improved = false;
        for _ in 0..40 {
            let step = grad.scale(-alpha);
            let trial = step_rep(&rep, &ws, &step);
            let trial_cost = cost(&trial);
            if trial_cost < current_cost {
                rep = trial;
                current_cost = trial_cost;
                trace.push(current_cost);
                iterations += 1;
                lambda = settings.damping_init;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !improved {
            stop = StopReason::Stalled;
            break;
        }
    }

    let rounded = round_and_verify(&rep, settings.round_tol);
    SolveReport {
        seed: problem.seed,
        final_cost: current_cost,
        iterations,
        stop,
        verified: rounded.is_some(),
        rounded,
        iterate: rep,
        trace,
        settings,
    }
}

fn step_rep(rep: &GardenRep<f64>, ws: &Workspace, step: &DVector<f64>) -> GardenRep<f64> {
    let mut l = rep.ls().to_vec();
    let mut r = rep.rs().to_vec();
    for (idx, p) in ws.params.iter().enumerate() {
        let value = get_param(rep, p) + step[idx];
        set_param(&mut l, &mut r, p, value);
    }
    rep_from_mats(l, r)
}

/// Tries to round the whole iterate onto a signed-permutation tuple
/// within `tol`: every `L_I` must decompose, every `R_I` must land on the
/// matching transpose, and the rebuilt exact tuple (with `R_I = L_I^T`)
/// must have residual exactly zero. `None` means the iterate is not near
/// the discrete zero set (it may still sit on a continuous orbit of exact
/// solutions).
pub fn round_and_verify(rep: &GardenRep<f64>, tol: f64) -> Option<GardenRep<i64>> {
    let mut sps: Vec<SignedPermutation> = Vec::with_capacity(rep.n_colors());
    for i in 0..rep.n_colors() {
        let sp = decompose_sp(rep.l(i), tol).ok()?;
        let r_sp = decompose_sp(rep.r(i), tol).ok()?;
        if r_sp.to_matrix() != sp.to_matrix().transpose() {
            return None;
        }
        sps.push(sp);
    }
    let exact = GardenRep::from_signed_perms(&sps).expect("shapes preserved");
    (garden_residual(&exact) == 0).then_some(exact)
}

/// Runs `count` independent seeds `problem.seed, problem.seed + 1, ...`
/// in parallel and returns the reports in seed order.
pub fn solve_batch(problem: &SolveProblem, count: usize) -> Vec<SolveReport> {
    (0..count as u64)
        .into_par_iter()
        .map(|offset| {
            let mut task = problem.clone();
            task.seed = problem.seed + offset;
            minimize(&task)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep_1x1(x: f64, y: f64) -> GardenRep<f64> {
        GardenRep::new(
            vec![Mat::from_rows(vec![vec![x]])],
            vec![Mat::from_rows(vec![vec![y]])],
        )
        .unwrap()
    }

    #[test]
    fn cost_matches_hand_value() {
        assert_eq!(cost(&rep_1x1(1.0, 2.0)), 8.0);
        assert_eq!(cost(&rep_1x1(1.0, 1.0)), 0.0);
    }

    #[test]
    fn cost_is_symmetric_in_l_and_r() {
        let a = rep_1x1(0.3, -1.7);
        let swapped = GardenRep::new(a.rs().to_vec(), a.ls().to_vec()).unwrap();
        assert_eq!(cost(&a), cost(&swapped));
    }

    #[test]
    fn gradient_matches_hand_formula_1x1() {
        // cost = 2 (2xy - 2)^2; grad = (8y(2xy-2), 8x(2xy-2))
        let (x, y) = (0.7, -1.3);
        let g = cost_gradient(&rep_1x1(x, y));
        let common = 2.0 * x * y - 2.0;
        assert!((g.l[0][(0, 0)] - 8.0 * y * common).abs() < 1e-12);
        assert!((g.r[0][(0, 0)] - 8.0 * x * common).abs() < 1e-12);
    }

    #[test]
    fn gradient_vanishes_at_exact_solutions() {
        let g = cost_gradient(&rep_1x1(1.0, 1.0));
        assert_eq!(g.l[0][(0, 0)], 0.0);
        assert_eq!(g.r[0][(0, 0)], 0.0);
    }

    #[test]
    fn minimize_solves_the_1x1_problem() {
        let report = minimize(&SolveProblem::free(1, 1, 7));
        assert_eq!(report.stop, StopReason::CostThreshold);
        assert!(report.final_cost < 1e-18);
        let x = report.iterate.l(0)[(0, 0)];
        let y = report.iterate.r(0)[(0, 0)];
        assert!((x * y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn trace_is_monotone_and_runs_are_deterministic() {
        let problem = SolveProblem::free(2, 2, 42);
        let a = minimize(&problem);
        let b = minimize(&problem);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        for w in a.trace.windows(2) {
            assert!(w[1] <= w[0], "trace must never increase");
        }
    }

    #[test]
    fn garbage_iterate_does_not_round() {
        assert!(round_and_verify(&rep_1x1(1.0, 2.0), 1e-6).is_none());
        assert!(round_and_verify(&rep_1x1(1.0 + 1e-8, 1.0), 1e-6).is_some());
    }
}
