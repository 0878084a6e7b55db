//! Sum-throughput maximization.
//!
//! Two independent routes to the same optimum:
//!
//! * [`allocate_closed_form`]: with `A = sum(gamma)` and `z* > 1` the root of
//!   `z ln z - z + 1 = A`, the optimum is `tau0 = (z* - 1) / (A + z* - 1)` and
//!   `tau_i = gamma_i / (A + z* - 1)`.
//! * [`allocate_golden_section`]: for a fixed `tau0` the inner problem is solved
//!   by giving every user the same SNR, which reduces the objective to the
//!   strictly concave `F(tau0) = (1 - tau0) log2(1 + A tau0 / (1 - tau0))`,
//!   maximized by golden-section search.
//!
//! Both put every user at the common SNR `z* - 1`.

use crate::channel::{user_rate, Scenario, TimeAllocation};
use crate::config::SolverConfig;
use crate::error::{invalid, Result};
use crate::search::golden_section_maximize;

/// Upper clip of the golden-section bracket, keeping `1 / (1 - tau0)` finite.
const TAU0_CLIP: f64 = 1e-12;

const SERIES_CUTOFF: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SumSolution {
    pub allocation: TimeAllocation,
    pub per_user_rate: Vec<f64>,
    pub sum_rate: f64,
    /// Root of `z ln z - z + 1 = A`; exactly 1 when `A = 0`.
    pub z_star: f64,
    /// Common SNR `gamma_i tau0 / tau_i` shared by all users.
    pub equal_snr: f64,
    /// Newton/bisection steps for the closed form, golden-section steps otherwise.
    pub iterations: usize,
}

/// `(1 + d) ln(1 + d) - d`, i.e. `z ln z - z + 1` at `z = 1 + d`, accurate for small `d`.
fn lambert_residual_base(d: f64) -> f64 {
    if d < SERIES_CUTOFF {
        // sum_{n>=2} (-1)^n d^n / (n (n - 1))
        let d2 = d * d;
        d2 * (0.5 - d / 6.0 + d2 / 12.0 - d2 * d / 20.0 + d2 * d2 / 30.0)
    } else {
        (1.0 + d) * d.ln_1p() - d
    }
}

/// Solves `h(d) = a` for `d = z - 1 >= 0`; returns `(d, iterations)`.
///
/// Newton's method on the increasing, convex `h` (derivative `ln(1 + d)`),
/// safeguarded by a sign-change bracket that falls back to bisection whenever
/// a Newton step leaves it.
fn solve_z_minus_one(a: f64, tol: f64) -> Result<(f64, usize)> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(invalid(format!("A must be finite and non-negative, got {a}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if a == 0.0 {
        return Ok((0.0, 0));
    }

    let mut lo = 0.0;
    let mut hi = a + 2.0 * a.sqrt();
    while lambert_residual_base(hi) < a {
        lo = hi;
        hi *= 2.0;
    }

    let e2_plus_one = std::f64::consts::E.powi(2) + 1.0;
    let mut d = if a >= e2_plus_one {
        a / a.ln() - 1.0
    } else {
        (2.0 * a).sqrt()
    };
    if !(d > lo && d < hi) {
        d = 0.5 * (lo + hi);
    }

    let mut best = (f64::INFINITY, d);
    for iteration in 1..=200 {
        let residual = lambert_residual_base(d) - a;
        if residual.abs() < best.0 {
            best = (residual.abs(), d);
        }
        if residual.abs() <= tol {
            return Ok((d, iteration));
        }
        if residual < 0.0 {
            lo = d;
        } else {
            hi = d;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok((best.1, iteration));
        }
        let slope = d.ln_1p();
        let newton = d - residual / slope;
        d = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok((best.1, 200))
}

/// Root `z >= 1` of `z ln z - z + 1 = a`.
///
/// Exactly 1 for `a = 0`. The left side vanishes at `z = 1` and is strictly
/// increasing beyond it, so the root is unique.
pub fn solve_z(a: f64, tol: f64) -> Result<f64> {
    solve_z_minus_one(a, tol).map(|(d, _)| 1.0 + d)
}

fn degenerate(k: usize) -> SumSolution {
    SumSolution {
        allocation: TimeAllocation::new(0.0, vec![1.0 / k as f64; k]),
        per_user_rate: vec![0.0; k],
        sum_rate: 0.0,
        z_star: 1.0,
        equal_snr: 0.0,
        iterations: 0,
    }
}

fn finish(
    scenario: &Scenario,
    allocation: TimeAllocation,
    z_star: f64,
    equal_snr: f64,
    iterations: usize,
) -> SumSolution {
    let per_user_rate: Vec<f64> = scenario
        .gamma()
        .iter()
        .zip(&allocation.tau)
        .map(|(&g, &t)| user_rate(g, allocation.tau0, t))
        .collect();
    let sum_rate = per_user_rate.iter().sum();
    SumSolution {
        allocation,
        per_user_rate,
        sum_rate,
        z_star,
        equal_snr,
        iterations,
    }
}

/// Semi-closed-form optimum through the scalar root `z*`.
pub fn allocate_closed_form(scenario: &Scenario, cfg: &SolverConfig) -> Result<SumSolution> {
    let a = scenario.total_gamma();
    if a == 0.0 {
        return Ok(degenerate(scenario.k()));
    }
    let (d, iterations) = solve_z_minus_one(a, cfg.z_tol)?;
    let denom = a + d;
    let allocation = TimeAllocation::new(d / denom, scenario.gamma().iter().map(|g| g / denom).collect());
    Ok(finish(scenario, allocation, 1.0 + d, d, iterations))
}

/// Sum rate as a function of `tau0` once the users share a common SNR.
pub fn equal_snr_objective(total_gamma: f64, tau0: f64) -> f64 {
    if tau0 <= 0.0 || tau0 >= 1.0 {
        return 0.0;
    }
    user_rate(total_gamma, tau0, 1.0 - tau0)
}

/// Golden-section route: maximizes [`equal_snr_objective`] over `tau0`, then
/// splits the remaining time in proportion to `gamma`.
pub fn allocate_golden_section(scenario: &Scenario, cfg: &SolverConfig) -> Result<SumSolution> {
    let a = scenario.total_gamma();
    if a == 0.0 {
        return Ok(degenerate(scenario.k()));
    }
    let search = golden_section_maximize(|t| equal_snr_objective(a, t), 0.0, 1.0 - TAU0_CLIP, cfg.sum_tau_tol);
    let tau0 = search.x;
    let remaining = 1.0 - tau0;
    let allocation = TimeAllocation::new(tau0, scenario.gamma().iter().map(|g| g / a * remaining).collect());
    let snr = a * tau0 / remaining;
    Ok(finish(scenario, allocation, 1.0 + snr, snr, search.iterations))
}

pub fn sum_rate(scenario: &Scenario, allocation: &TimeAllocation) -> Result<f64> {
    if allocation.tau.len() != scenario.k() {
        return Err(invalid(format!(
            "allocation has {} slots but the scenario has {} users",
            allocation.tau.len(),
            scenario.k()
        )));
    }
    Ok(scenario
        .gamma()
        .iter()
        .zip(&allocation.tau)
        .map(|(&g, &t)| user_rate(g, allocation.tau0, t))
        .sum())
}
