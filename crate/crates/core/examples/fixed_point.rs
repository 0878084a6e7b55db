//! The per-user slot solve: the shortest slot that delivers a target rate.
//!
//! `cargo run --example fixed_point`

use wpcn::{fixed_point_tau, user_rate, SolverConfig};

fn main() -> wpcn::Result<()> {
    let cfg = SolverConfig::default();
    let tau0 = 0.5;
    for gamma in [0.1, 1.0, 10.0, 100.0] {
        let cap = gamma * tau0 / std::f64::consts::LN_2;
        let r_bar = 0.5f64.min(0.5 * cap);
        let solve = fixed_point_tau(gamma, tau0, r_bar, &cfg)?;
        println!(
            "gamma {gamma:6}: tau {:.12} after {:3} steps{}  (rate check {:.3e})",
            solve.tau,
            solve.iterations,
            if solve.fell_back { ", bisection fallback" } else { "" },
            user_rate(gamma, tau0, solve.tau) - r_bar
        );
    }
    // at or above the asymptotic cap no slot length is long enough
    println!("{:?}", fixed_point_tau(1.0, 0.5, 1.0, &cfg).unwrap_err());
    Ok(())
}
