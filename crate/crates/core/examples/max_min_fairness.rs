//! Max-min fair allocation and how it compares with the sum-rate optimum.
//!
//! `cargo run --example max_min_fairness`

use wpcn::{allocate_closed_form, sample_scenario, solve_maxmin, SamplingParams, SolverConfig};

fn main() -> wpcn::Result<()> {
    let cfg = SolverConfig::default();
    let params = SamplingParams {
        p_max_dbm: 20.0,
        ..SamplingParams::default()
    };
    let scenario = sample_scenario(4, &params, 7)?;

    let sum = allocate_closed_form(&scenario, &cfg)?;
    let fair = solve_maxmin(&scenario, &cfg)?;
    println!("              tau0      worst rate  total rate");
    let worst = sum.per_user_rate.iter().copied().fold(f64::INFINITY, f64::min);
    println!(
        "sum-rate   {:9.6}  {worst:10.6}  {:10.6}",
        sum.allocation.tau0, sum.sum_rate
    );
    let total: f64 = fair.per_user_rate.iter().sum();
    println!(
        "max-min    {:9.6}  {:10.6}  {total:10.6}",
        fair.allocation.tau0, fair.common_rate
    );
    println!(
        "search effort: {} golden steps, {} bisections, {} fixed-point steps, {} fallbacks",
        fair.outer_iterations, fair.bisection_iterations, fair.total_fixed_point_iterations, fair.fallbacks
    );
    println!("rate spread at the max-min optimum: {:.2e}", fair.rate_spread());
    Ok(())
}
