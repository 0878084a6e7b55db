//! Max-min (common) throughput maximization.
//!
//! Three nested searches:
//!
//! 1. For a fixed `tau0` and target rate `r`, each user needs the unique slot
//!    length `tau_i` with `tau_i log2(1 + gamma_i tau0 / tau_i) = r`. It is found
//!    by the fixed-point iteration `tau <- r / log2(1 + gamma_i tau0 / tau)`
//!    ([`fixed_point_tau`]), with a bracketed bisection fallback.
//! 2. The slot lengths grow with `r`, so the largest common rate that fits into
//!    `1 - tau0` is found by bisection on `r` ([`bisect_common_rate`]). Its value
//!    is `g(tau0)`, the best worst-user rate for that `tau0`.
//! 3. `g` is strictly concave on `[0, 1]` with `g(0) = g(1) = 0`, so the outer
//!    golden-section search over `tau0` reaches the global optimum ([`solve_maxmin`]).

use std::f64::consts::LN_2;

use rand::Rng;

use crate::channel::{rng_from_seed, user_rate, Scenario, TimeAllocation};
use crate::config::SolverConfig;
use crate::error::{invalid, Error, Result};
use crate::search::{bisect_increasing, golden_section_maximize};

/// Outer search domain is `[TAU0_MARGIN, 1 - TAU0_MARGIN]`.
pub const TAU0_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinSolution {
    pub allocation: TimeAllocation,
    /// Common rate `R*` in bps/Hz.
    pub common_rate: f64,
    pub per_user_rate: Vec<f64>,
    pub outer_iterations: usize,
    pub bisection_iterations: usize,
    pub total_fixed_point_iterations: usize,
    /// Per-user solves that needed the bisection fallback.
    pub fallbacks: usize,
}

impl MaxMinSolution {
    /// `max(rate) - min(rate)` over users.
    pub fn rate_spread(&self) -> f64 {
        let max = self.per_user_rate.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.per_user_rate.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Outcome of one per-user slot-length solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotSolve {
    pub tau: f64,
    pub iterations: usize,
    pub fell_back: bool,
}

/// `tau log2(1 + energy / tau)`, the rate as a function of slot length.
fn slot_rate(energy: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    tau * (energy / tau).ln_1p() / LN_2
}

/// Slope of the fixed-point map `tau -> r / log2(1 + energy / tau)` at SNR `x = energy / tau`.
fn map_slope(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    x / ((1.0 + x) * x.ln_1p())
}

/// Slot length at which user `i` reaches `r_bar`.
///
/// Starts at `r_bar / log2(1 + gamma_i tau0 / (1 - tau0))` and iterates the
/// fixed-point map. The map is increasing with slope
/// `L = x / ((1 + x) ln(1 + x)) < 1` at SNR `x`, so the iterates approach the
/// root monotonically and `|step| L / (1 - L)` bounds the remaining error;
/// iteration stops once that bound is below `fp_tol`.
///
/// At low SNR `L` tends to 1 and convergence crawls. When the iteration cap
/// is hit, a step is non-monotone, or the contraction estimate says the cap
/// cannot be met, the solve falls back to bisection on the rate residual
/// inside the bracket the iterates have already established.
pub fn fixed_point_tau(gamma_i: f64, tau0: f64, r_bar: f64, cfg: &SolverConfig) -> Result<SlotSolve> {
    if r_bar <= 0.0 {
        return Ok(SlotSolve {
            tau: 0.0,
            iterations: 0,
            fell_back: false,
        });
    }
    let energy = gamma_i * tau0;
    let cap = if energy > 0.0 { energy / LN_2 } else { 0.0 };
    if !(r_bar < cap) {
        return Err(Error::NoRoot { rate: r_bar, cap });
    }

    let budget = if tau0 < 1.0 { 1.0 - tau0 } else { 1.0 };
    let mut tau = r_bar * LN_2 / (energy / budget).ln_1p();
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut prev_step = 0.0f64;
    let mut iterations = 0;

    while iterations < cfg.fp_max_iter {
        if !(tau > 0.0 && tau.is_finite()) {
            break;
        }
        iterations += 1;
        let next = r_bar * LN_2 / (energy / tau).ln_1p();
        let step = next - tau;
        if step == 0.0 {
            return Ok(SlotSolve {
                tau: next,
                iterations,
                fell_back: false,
            });
        }
        if iterations > 1 && (step * prev_step < 0.0 || step.abs() > prev_step.abs()) {
            break;
        }
        // slope is largest at the larger end of [root, iterate]
        let slope = map_slope(energy / tau.max(next));
        let error = step.abs() * slope / (1.0 - slope);
        if step < 0.0 {
            hi = next;
            lo = f64::max(lo, next - error);
        } else {
            lo = next;
        }
        tau = next;
        if slope < 1.0 && error <= cfg.fp_tol {
            return Ok(SlotSolve {
                tau,
                iterations,
                fell_back: false,
            });
        }
        let remaining = (cfg.fp_max_iter - iterations) as f64;
        if slope >= 1.0 || (cfg.fp_tol / error).ln() / slope.ln() > remaining {
            break;
        }
        prev_step = step;
    }

    let tau = bisect_slot(energy, r_bar, (lo, hi), budget, cfg.fp_tol).ok_or(Error::NoRoot { rate: r_bar, cap })?;
    Ok(SlotSolve {
        tau,
        iterations,
        fell_back: true,
    })
}

/// Bisection on `slot_rate(energy, tau) - r_bar`, starting from `hint` when it brackets the root.
fn bisect_slot(energy: f64, r_bar: f64, hint: (f64, f64), budget: f64, width: f64) -> Option<f64> {
    let residual = |t: f64| slot_rate(energy, t) - r_bar;
    let (mut lo, mut hi) = hint;
    if !(lo >= 0.0 && residual(lo) <= 0.0) {
        lo = 0.0;
    }
    if !(hi.is_finite() && residual(hi) >= 0.0) {
        hi = budget.max(1.0).max(lo);
        let mut doublings = 0;
        while residual(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 1100 || !hi.is_finite() {
                return None;
            }
        }
    }
    let (tau, _) = bisect_increasing(residual, lo, hi, width, 4000);
    Some(tau)
}

/// Per-user slot lengths needed for a common rate, and their total.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    /// `sum(tau_i)`, or `+inf` when some user cannot reach the rate at all.
    pub sum_tau: f64,
    pub taus: Vec<f64>,
    pub fixed_point_iterations: usize,
    pub fallbacks: usize,
}

impl Feasibility {
    pub fn is_infeasible(&self) -> bool {
        self.sum_tau.is_infinite()
    }
}

/// Solves every user's slot length for `r_bar`; the caller compares the sum with `1 - tau0`.
pub fn rate_feasibility(scenario: &Scenario, tau0: f64, r_bar: f64, cfg: &SolverConfig) -> Feasibility {
    let mut taus = Vec::with_capacity(scenario.k());
    let mut fixed_point_iterations = 0;
    let mut fallbacks = 0;
    for &gamma in scenario.gamma() {
        match fixed_point_tau(gamma, tau0, r_bar, cfg) {
            Ok(solve) => {
                fixed_point_iterations += solve.iterations;
                fallbacks += usize::from(solve.fell_back);
                taus.push(solve.tau);
            }
            Err(_) => {
                return Feasibility {
                    sum_tau: f64::INFINITY,
                    taus,
                    fixed_point_iterations,
                    fallbacks,
                }
            }
        }
    }
    Feasibility {
        sum_tau: taus.iter().sum(),
        taus,
        fixed_point_iterations,
        fallbacks,
    }
}

/// Like [`rate_feasibility`] but stops as soon as the running total passes `limit`.
fn feasibility_up_to(scenario: &Scenario, tau0: f64, r_bar: f64, limit: f64, cfg: &SolverConfig) -> Feasibility {
    let mut taus = Vec::with_capacity(scenario.k());
    let mut sum_tau = 0.0;
    let mut fixed_point_iterations = 0;
    let mut fallbacks = 0;
    for &gamma in scenario.gamma() {
        match fixed_point_tau(gamma, tau0, r_bar, cfg) {
            Ok(solve) => {
                fixed_point_iterations += solve.iterations;
                fallbacks += usize::from(solve.fell_back);
                sum_tau += solve.tau;
                taus.push(solve.tau);
                if sum_tau > limit {
                    break;
                }
            }
            Err(_) => {
                sum_tau = f64::INFINITY;
                break;
            }
        }
    }
    Feasibility {
        sum_tau,
        taus,
        fixed_point_iterations,
        fallbacks,
    }
}

/// Largest common rate for a fixed `tau0`, with the slot lengths that realize it.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonRate {
    pub r_bar: f64,
    pub taus: Vec<f64>,
    pub iterations: usize,
    pub fixed_point_iterations: usize,
    pub fallbacks: usize,
}

/// Bisection on the common rate for a fixed `tau0 in (0, 1)`.
///
/// The bracket starts at `[0, min_i (1 - tau0) log2(1 + gamma_i tau0 / (1 - tau0))]`:
/// no user can beat the rate it would get with the whole remaining time, and
/// every per-user solve below that bound has a root inside `[0, 1 - tau0]`.
/// Ends once `|sum(tau_i) - (1 - tau0)| <= time_tol * (1 - tau0)`, or when the bracket can
/// no longer be split.
pub fn bisect_common_rate(scenario: &Scenario, tau0: f64, cfg: &SolverConfig) -> Result<CommonRate> {
    if !(tau0 > 0.0 && tau0 < 1.0) {
        return Err(invalid(format!("tau0 must lie in (0, 1), got {tau0}")));
    }
    let budget = 1.0 - tau0;
    let k = scenario.k();
    let r_max = scenario
        .gamma()
        .iter()
        .map(|&g| user_rate(g, tau0, budget))
        .fold(f64::INFINITY, f64::min);
    if !(r_max > 0.0) {
        return Ok(CommonRate {
            r_bar: 0.0,
            taus: vec![budget / k as f64; k],
            iterations: 0,
            fixed_point_iterations: 0,
            fallbacks: 0,
        });
    }

    // relative band: the slot times shrink with the budget when tau0 nears 1
    let band = cfg.time_tol * budget;
    let (mut lo, mut hi) = (0.0, r_max);
    let mut fixed_point_iterations = 0;
    let mut fallbacks = 0;
    let mut best = 0.0;
    for iteration in 1..=cfg.bisect_max_iter {
        let r_bar = 0.5 * (lo + hi);
        let check = feasibility_up_to(scenario, tau0, r_bar, budget + band, cfg);
        fixed_point_iterations += check.fixed_point_iterations;
        fallbacks += check.fallbacks;
        let gap = check.sum_tau - budget;
        if gap.abs() <= band && check.taus.len() == k {
            return Ok(CommonRate {
                r_bar,
                taus: check.taus,
                iterations: iteration,
                fixed_point_iterations,
                fallbacks,
            });
        }
        if gap > 0.0 {
            hi = r_bar;
        } else {
            lo = r_bar;
            best = r_bar;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            // bracket exhausted; settle on the feasible end
            let check = rate_feasibility(scenario, tau0, lo, cfg);
            return Ok(CommonRate {
                r_bar: lo,
                taus: check.taus,
                iterations: iteration,
                fixed_point_iterations: fixed_point_iterations + check.fixed_point_iterations,
                fallbacks: fallbacks + check.fallbacks,
            });
        }
    }
    Err(Error::Convergence {
        solver: "common-rate bisection",
        iterations: cfg.bisect_max_iter,
        best,
    })
}

/// `g(tau0)`: the best worst-user rate for a given power-transfer fraction.
///
/// Zero at and outside the ends of `[0, 1]`.
pub fn common_rate_at(scenario: &Scenario, tau0: f64, cfg: &SolverConfig) -> Result<f64> {
    if tau0 <= 0.0 || tau0 >= 1.0 {
        return Ok(0.0);
    }
    bisect_common_rate(scenario, tau0, cfg).map(|c| c.r_bar)
}

fn zero_solution(k: usize) -> MaxMinSolution {
    MaxMinSolution {
        allocation: TimeAllocation::new(0.0, vec![1.0 / k as f64; k]),
        common_rate: 0.0,
        per_user_rate: vec![0.0; k],
        outer_iterations: 0,
        bisection_iterations: 0,
        total_fixed_point_iterations: 0,
        fallbacks: 0,
    }
}

/// Maximizes the minimum user rate.
///
/// If any user has `gamma_i = 0` the optimum is 0 and the deterministic
/// allocation `tau0 = 0, tau_i = 1/K` is returned.
pub fn solve_maxmin(scenario: &Scenario, cfg: &SolverConfig) -> Result<MaxMinSolution> {
    cfg.validate()?;
    let k = scenario.k();
    if scenario.gamma().iter().any(|&g| g <= 0.0) {
        return Ok(zero_solution(k));
    }

    let mut bisection_iterations = 0;
    let mut fixed_point_iterations = 0;
    let mut fallbacks = 0;
    let mut failure: Option<Error> = None;
    let mut evaluate = |tau0: f64| -> Option<CommonRate> {
        match bisect_common_rate(scenario, tau0, cfg) {
            Ok(c) => {
                bisection_iterations += c.iterations;
                fixed_point_iterations += c.fixed_point_iterations;
                fallbacks += c.fallbacks;
                Some(c)
            }
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        }
    };

    let outer = golden_section_maximize(
        |t| evaluate(t).map_or(f64::NEG_INFINITY, |c| c.r_bar),
        TAU0_MARGIN,
        1.0 - TAU0_MARGIN,
        cfg.tau_tol,
    );
    let tau0 = outer.x;
    let last = evaluate(tau0);
    if let Some(err) = failure {
        return Err(err);
    }
    let Some(common) = last else {
        unreachable!("evaluation failures are reported above");
    };

    let per_user_rate = scenario
        .gamma()
        .iter()
        .zip(&common.taus)
        .map(|(&g, &t)| user_rate(g, tau0, t))
        .collect();
    Ok(MaxMinSolution {
        allocation: TimeAllocation::new(tau0, common.taus),
        common_rate: common.r_bar,
        per_user_rate,
        outer_iterations: outer.iterations,
        bisection_iterations,
        total_fixed_point_iterations: fixed_point_iterations,
        fallbacks,
    })
}

/// `g(theta t1 + (1 - theta) t2) - (theta g(t1) + (1 - theta) g(t2))`.
pub fn concavity_gap(scenario: &Scenario, t1: f64, t2: f64, theta: f64, cfg: &SolverConfig) -> Result<f64> {
    let mid = common_rate_at(scenario, theta * t1 + (1.0 - theta) * t2, cfg)?;
    let chord = theta * common_rate_at(scenario, t1, cfg)? + (1.0 - theta) * common_rate_at(scenario, t2, cfg)?;
    Ok(mid - chord)
}

/// Samples `samples` random `(t1, t2, theta)` triples and checks
/// `g(theta t1 + (1 - theta) t2) >= theta g(t1) + (1 - theta) g(t2) - 10 rate_tol`.
pub fn g_concavity_probe(scenario: &Scenario, samples: usize, cfg: &SolverConfig, seed: u64) -> bool {
    let mut rng = rng_from_seed(seed);
    let slack = 10.0 * cfg.rate_tol;
    (0..samples.max(1)).all(|_| {
        let t1: f64 = rng.gen();
        let t2: f64 = rng.gen();
        let theta: f64 = rng.gen();
        matches!(concavity_gap(scenario, t1, t2, theta, cfg), Ok(gap) if gap >= -slack)
    })
}
