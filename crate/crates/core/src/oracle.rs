//! Independent reference solvers.
//!
//! Exhaustive grids give ground truth for small instances. The projected
//! subgradient solver is a generic concave maximizer used as the runtime
//! comparand for the max-min algorithm; it knows nothing about the problem
//! structure beyond function values and subgradients.

use std::f64::consts::LN_2;
use std::time::Instant;

use crate::channel::{user_rate, Scenario, TimeAllocation};
use crate::config::SolverConfig;
use crate::error::{invalid, Error, Result};
use crate::maxmin::{bisect_common_rate, TAU0_MARGIN};
use crate::search::golden_section_maximize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub step: f64,
    pub dimensions: usize,
}

impl GridSpec {
    pub fn new(step: f64, dimensions: usize) -> Result<Self> {
        let spec = Self { step, dimensions };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 0.1) {
            return Err(invalid(format!("grid step must lie in (0, 0.1], got {}", self.step)));
        }
        if !(1..=2).contains(&self.dimensions) {
            return Err(Error::UnsupportedDimension(format!(
                "grid sweeps are limited to 1 or 2 dimensions, got {}",
                self.dimensions
            )));
        }
        Ok(())
    }

    /// Number of steps across `[0, 1]`.
    fn intervals(&self) -> usize {
        (1.0 / self.step + 1e-9).floor() as usize
    }
}

/// Grid search for the sum-throughput optimum.
///
/// One dimension sweeps `tau0` and splits the rest of the frame in proportion
/// to `gamma` (the equal-SNR inner optimum). Two dimensions (`K = 2` only)
/// sweep `(tau0, tau1)` exhaustively with `tau2 = 1 - tau0 - tau1`.
/// Ties keep the smallest `tau0`, then the smallest `tau1`.
pub fn grid_sum_oracle(scenario: &Scenario, grid: &GridSpec) -> Result<(TimeAllocation, f64)> {
    grid.validate()?;
    let k = scenario.k();
    let n = grid.intervals();
    let a = scenario.total_gamma();

    if grid.dimensions == 2 {
        if k != 2 {
            return Err(Error::UnsupportedDimension(format!(
                "two-dimensional sum sweep needs K = 2, got {k}"
            )));
        }
        return Ok(sweep_pairs(scenario, n, grid.step, |r1, r2| r1 + r2));
    }

    if a == 0.0 {
        return Ok((TimeAllocation::new(0.0, vec![1.0 / k as f64; k]), 0.0));
    }
    let mut best = (TimeAllocation::new(0.0, vec![0.0; k]), f64::NEG_INFINITY);
    for i in 0..=n {
        let tau0 = (i as f64 * grid.step).min(1.0);
        let tau: Vec<f64> = scenario.gamma().iter().map(|g| g / a * (1.0 - tau0)).collect();
        let value: f64 = scenario
            .gamma()
            .iter()
            .zip(&tau)
            .map(|(&g, &t)| user_rate(g, tau0, t))
            .sum();
        if value > best.1 {
            best = (TimeAllocation::new(tau0, tau), value);
        }
    }
    Ok(best)
}

fn sweep_pairs(scenario: &Scenario, n: usize, step: f64, objective: impl Fn(f64, f64) -> f64) -> (TimeAllocation, f64) {
    let (g1, g2) = (scenario.gamma()[0], scenario.gamma()[1]);
    let mut best = (0.0, 0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..=n {
        let tau0 = (i as f64 * step).min(1.0);
        for j in 0..=(n - i) {
            let tau1 = j as f64 * step;
            let tau2 = (1.0 - tau0 - tau1).max(0.0);
            let value = objective(user_rate(g1, tau0, tau1), user_rate(g2, tau0, tau2));
            if value > best.3 {
                best = (tau0, tau1, tau2, value);
            }
        }
    }
    (TimeAllocation::new(best.0, vec![best.1, best.2]), best.3)
}

/// Exhaustive `(tau0, tau1)` sweep of `min(R1, R2)` for two users, `tau2 = 1 - tau0 - tau1`.
pub fn grid_maxmin_oracle(scenario: &Scenario, grid: &GridSpec) -> Result<(TimeAllocation, f64)> {
    grid.validate()?;
    if scenario.k() != 2 {
        return Err(Error::UnsupportedDimension(format!(
            "max-min grid oracle needs K = 2, got {}",
            scenario.k()
        )));
    }
    Ok(sweep_pairs(scenario, grid.intervals(), grid.step, f64::min))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineReport {
    /// Best worst-user rate found, bps/Hz.
    pub objective: f64,
    pub iterations: usize,
    /// Seconds spent inside the solver.
    pub wall_time: f64,
    pub allocation: TimeAllocation,
}

/// Euclidean projection onto `{x >= 0, sum(x) = total}` (sort-based).
pub fn project_onto_simplex(v: &mut [f64], total: f64) {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - total) / (i + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - shift).max(0.0);
    }
}

struct SubgradientRun {
    best_x: Vec<f64>,
    best_value: f64,
    iterations: usize,
    converged: bool,
}

/// Normalized projected subgradient ascent on the scaled simplex.
///
/// `oracle(x, grad)` returns `f(x)` and writes a supergradient into `grad`.
/// Step `n` moves `a / (b + n)` along the normalized supergradient. Stops when
/// the best value has improved by less than `rate_tol` over the last
/// `subgrad_patience` iterations.
fn projected_subgradient<F>(
    mut oracle: F,
    mut x: Vec<f64>,
    total: f64,
    target: Option<f64>,
    cfg: &SolverConfig,
) -> SubgradientRun
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut grad = vec![0.0; x.len()];
    let mut best_x = x.clone();
    let mut best_value = f64::NEG_INFINITY;
    let mut anchor_value = f64::NEG_INFINITY;
    let mut anchor_iter = 0;

    for n in 0..cfg.subgrad_max_iter {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let value = oracle(&x, &mut grad);
        if value > best_value {
            best_value = value;
            best_x.copy_from_slice(&x);
            if target.is_some_and(|t| best_value >= t) {
                return SubgradientRun {
                    best_x,
                    best_value,
                    iterations: n + 1,
                    converged: true,
                };
            }
        }
        if best_value >= anchor_value + cfg.rate_tol {
            anchor_value = best_value;
            anchor_iter = n;
        } else if target.is_none() && n - anchor_iter >= cfg.subgrad_patience {
            return SubgradientRun {
                best_x,
                best_value,
                iterations: n + 1,
                converged: true,
            };
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return SubgradientRun {
                best_x,
                best_value,
                iterations: n + 1,
                converged: norm == 0.0,
            };
        }
        let step = cfg.subgrad_step_a / (cfg.subgrad_step_b + n as f64) / norm;
        x.iter_mut().zip(&grad).for_each(|(xi, gi)| *xi += step * gi);
        project_onto_simplex(&mut x, total);
    }
    SubgradientRun {
        best_x,
        best_value,
        iterations: cfg.subgrad_max_iter,
        converged: false,
    }
}

/// Partial derivatives of `tau log2(1 + energy / tau)` w.r.t. `(tau0, tau)` at `energy = gamma tau0`.
fn rate_partials(gamma: f64, tau0: f64, tau: f64) -> (f64, f64) {
    if tau <= 0.0 {
        return (0.0, 1.0);
    }
    let x = gamma * tau0 / tau;
    (gamma / ((1.0 + x) * LN_2), x.ln_1p() / LN_2 - x / ((1.0 + x) * LN_2))
}

fn argmin_rate(gamma: &[f64], tau0: f64, tau: &[f64]) -> (usize, f64) {
    let mut worst = (0, f64::INFINITY);
    for (i, (&g, &t)) in gamma.iter().zip(tau).enumerate() {
        let r = user_rate(g, tau0, t);
        if r < worst.1 {
            worst = (i, r);
        }
    }
    worst
}

/// Generic baseline for the inner max-min problem at a fixed `tau0`:
/// maximize `min_i R_i(tau0, tau_i)` over `sum(tau) = 1 - tau0, tau >= 0`.
pub fn subgradient_maxmin_baseline(scenario: &Scenario, tau0: f64, cfg: &SolverConfig) -> Result<BaselineReport> {
    inner_baseline(scenario, tau0, None, cfg)
}

/// Inner baseline timed to a known objective level: runs until the best
/// worst-user rate reaches `target` (or the iteration cap).
pub fn subgradient_maxmin_baseline_to_target(
    scenario: &Scenario,
    tau0: f64,
    target: f64,
    cfg: &SolverConfig,
) -> Result<BaselineReport> {
    inner_baseline(scenario, tau0, Some(target), cfg)
}

fn inner_baseline(scenario: &Scenario, tau0: f64, target: Option<f64>, cfg: &SolverConfig) -> Result<BaselineReport> {
    if !(tau0 > 0.0 && tau0 < 1.0) {
        return Err(invalid(format!("tau0 must lie in (0, 1), got {tau0}")));
    }
    let gamma = scenario.gamma();
    let k = gamma.len();
    let budget = 1.0 - tau0;
    let start = Instant::now();

    let run = if k == 1 {
        SubgradientRun {
            best_x: vec![budget],
            best_value: user_rate(gamma[0], tau0, budget),
            iterations: 1,
            converged: true,
        }
    } else {
        projected_subgradient(
            |tau, grad| {
                let (i, value) = argmin_rate(gamma, tau0, tau);
                grad[i] = rate_partials(gamma[i], tau0, tau[i]).1;
                value
            },
            vec![budget / k as f64; k],
            budget,
            target,
            cfg,
        )
    };
    let wall_time = start.elapsed().as_secs_f64();
    if !run.converged {
        return Err(Error::Convergence {
            solver: "subgradient baseline",
            iterations: run.iterations,
            best: run.best_value,
        });
    }
    Ok(BaselineReport {
        objective: run.best_value,
        iterations: run.iterations,
        wall_time,
        allocation: TimeAllocation::new(tau0, run.best_x),
    })
}

/// Full max-min problem solved with the same golden-section search over
/// `tau0` as the proposed solver, but with the subgradient baseline as the
/// inner solver.
///
/// Each inner run stops once it reaches `(1 - eps)` times the true inner
/// optimum, which is computed beforehand with `cfg`'s tolerances. Only the
/// subgradient runs are timed, so the reported `wall_time` is what the
/// baseline would need if it knew when to stop.
pub fn subgradient_maxmin_nested(scenario: &Scenario, eps: f64, cfg: &SolverConfig) -> Result<BaselineReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let k = scenario.k();
    if scenario.gamma().iter().any(|&g| g <= 0.0) {
        return Ok(BaselineReport {
            objective: 0.0,
            iterations: 0,
            wall_time: 0.0,
            allocation: TimeAllocation::new(0.0, vec![1.0 / k as f64; k]),
        });
    }

    let mut wall_time = 0.0;
    let mut iterations = 0;
    let mut failure: Option<Error> = None;
    let mut best: Option<BaselineReport> = None;
    golden_section_maximize(
        |tau0| {
            let run = bisect_common_rate(scenario, tau0, cfg).and_then(|reference| {
                subgradient_maxmin_baseline_to_target(scenario, tau0, reference.r_bar * (1.0 - eps), cfg)
            });
            match run {
                Ok(report) => {
                    wall_time += report.wall_time;
                    iterations += report.iterations;
                    let value = report.objective;
                    if best.as_ref().is_none_or(|b| value > b.objective) {
                        best = Some(report);
                    }
                    value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        TAU0_MARGIN,
        1.0 - TAU0_MARGIN,
        eps,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    let best = best.expect("golden-section search evaluates at least twice");
    Ok(BaselineReport {
        objective: best.objective,
        iterations,
        wall_time,
        allocation: best.allocation,
    })
}

/// Generic baseline for the full max-min problem: projected subgradient over
/// `(tau0, tau_1, ..., tau_K)` on the unit simplex.
pub fn subgradient_maxmin_joint(scenario: &Scenario, cfg: &SolverConfig) -> Result<BaselineReport> {
    joint_baseline(scenario, None, cfg)
}

/// Joint baseline timed to a known objective level: runs until the best
/// worst-user rate reaches `target` (or the iteration cap).
pub fn subgradient_maxmin_joint_to_target(
    scenario: &Scenario,
    target: f64,
    cfg: &SolverConfig,
) -> Result<BaselineReport> {
    joint_baseline(scenario, Some(target), cfg)
}

fn joint_baseline(scenario: &Scenario, target: Option<f64>, cfg: &SolverConfig) -> Result<BaselineReport> {
    let gamma = scenario.gamma();
    let k = gamma.len();
    let start = Instant::now();
    let mut x0 = vec![0.5 / k as f64; k + 1];
    x0[0] = 0.5;
    let run = projected_subgradient(
        |x, grad| {
            let (i, value) = argmin_rate(gamma, x[0], &x[1..]);
            let (d_tau0, d_tau) = rate_partials(gamma[i], x[0], x[i + 1]);
            grad[0] = d_tau0;
            grad[i + 1] = d_tau;
            value
        },
        x0,
        1.0,
        target,
        cfg,
    );
    let wall_time = start.elapsed().as_secs_f64();
    if !run.converged {
        return Err(Error::Convergence {
            solver: "joint subgradient baseline",
            iterations: run.iterations,
            best: run.best_value,
        });
    }
    Ok(BaselineReport {
        objective: run.best_value,
        iterations: run.iterations,
        wall_time,
        allocation: TimeAllocation::new(run.best_x[0], run.best_x[1..].to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(0.0, 1).is_err());
        assert!(GridSpec::new(0.2, 1).is_err());
        assert!(matches!(GridSpec::new(0.01, 3), Err(Error::UnsupportedDimension(_))));
        assert!(GridSpec::new(0.1, 2).is_ok());
    }

    #[test]
    fn sum_grid_single_user() {
        let s = Scenario::from_gamma(&[1.0]).unwrap();
        let (alloc, _) = grid_sum_oracle(&s, &GridSpec::new(1e-4, 1).unwrap()).unwrap();
        assert!((alloc.tau0 - (E - 1.0) / E).abs() <= 1e-4);
    }

    #[test]
    fn sum_grid_zero_gamma() {
        let s = Scenario::from_gamma(&[0.0, 0.0]).unwrap();
        let (_, value) = grid_sum_oracle(&s, &GridSpec::new(1e-2, 1).unwrap()).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn two_dimensional_sum_grid_needs_two_users() {
        let s = Scenario::from_gamma(&[1.0, 2.0, 3.0]).unwrap();
        assert!(grid_sum_oracle(&s, &GridSpec::new(1e-2, 2).unwrap()).is_err());
    }

    #[test]
    fn maxmin_grid_symmetric_and_starved() {
        let grid = GridSpec::new(1e-3, 2).unwrap();
        let s = Scenario::from_gamma(&[1.5, 1.5]).unwrap();
        let (alloc, _) = grid_maxmin_oracle(&s, &grid).unwrap();
        assert!((alloc.tau[0] - alloc.tau[1]).abs() <= 1e-3 + 1e-12);
        let s = Scenario::from_gamma(&[1.5, 0.0]).unwrap();
        let (_, value) = grid_maxmin_oracle(&s, &grid).unwrap();
        assert_eq!(value, 0.0);
        let s = Scenario::from_gamma(&[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            grid_maxmin_oracle(&s, &grid),
            Err(Error::UnsupportedDimension(_))
        ));
    }

    #[test]
    fn simplex_projection() {
        let mut v = vec![0.5, 0.5, 0.5];
        project_onto_simplex(&mut v, 0.9);
        for x in &v {
            assert!((x - 0.3).abs() < 1e-15);
        }
        let mut v = vec![2.0, -1.0, 0.1];
        project_onto_simplex(&mut v, 1.0);
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
        let mut v = vec![0.2, 0.3];
        project_onto_simplex(&mut v, 1.0);
        assert!((v[0] - 0.45).abs() < 1e-15 && (v[1] - 0.55).abs() < 1e-15);
    }

    #[test]
    fn baseline_single_user_is_exact() {
        let s = Scenario::from_gamma(&[2.0]).unwrap();
        let report = subgradient_maxmin_baseline(&s, 0.4, &SolverConfig::default()).unwrap();
        assert_eq!(report.allocation.tau, vec![0.6]);
        assert_eq!(report.objective, user_rate(2.0, 0.4, 0.6));
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn baseline_symmetric_pair_splits_evenly() {
        let s = Scenario::from_gamma(&[1.0, 1.0]).unwrap();
        let cfg = SolverConfig::default();
        let report = subgradient_maxmin_baseline(&s, 0.5, &cfg).unwrap();
        let exact = user_rate(1.0, 0.5, 0.25);
        assert!((report.objective - exact).abs() <= 10.0 * cfg.rate_tol);
    }

    #[test]
    fn baseline_rejects_bad_tau0() {
        let s = Scenario::from_gamma(&[1.0, 1.0]).unwrap();
        assert!(subgradient_maxmin_baseline(&s, 1.0, &SolverConfig::default()).is_err());
    }
}
