//! Sum-throughput allocation: closed form vs. golden-section search.
//!
//! `cargo run --example sum_throughput`

use wpcn::sum_throughput::allocate_golden_section;
use wpcn::{allocate_closed_form, sample_scenario, SamplingParams, SolverConfig};

fn main() -> wpcn::Result<()> {
    let cfg = SolverConfig::default();
    let params = SamplingParams {
        p_max_dbm: 20.0,
        ..SamplingParams::default()
    };
    let scenario = sample_scenario(4, &params, 7)?;
    println!("gamma = {:?}", scenario.gamma());

    let closed = allocate_closed_form(&scenario, &cfg)?;
    let golden = allocate_golden_section(&scenario, &cfg)?;
    println!(
        "closed form   : sum rate {:.9}, tau0 {:.6}, z* {:.6}",
        closed.sum_rate, closed.allocation.tau0, closed.z_star
    );
    println!(
        "golden section: sum rate {:.9}, tau0 {:.6}",
        golden.sum_rate, golden.allocation.tau0
    );

    // every user sees the same SNR at the optimum
    for (i, (g, t)) in scenario.gamma().iter().zip(&closed.allocation.tau).enumerate() {
        println!(
            "user {}: tau {t:.6}, snr {:.6}, rate {:.6}",
            i + 1,
            g * closed.allocation.tau0 / t,
            closed.per_user_rate[i]
        );
    }
    Ok(())
}
