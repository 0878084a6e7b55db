//! Timing the max-min solver against the generic subgradient baselines.
//!
//! `cargo run --release --example baseline_comparison`

use std::time::Instant;

use wpcn::oracle::{subgradient_maxmin_joint_to_target, subgradient_maxmin_nested};
use wpcn::{sample_scenario, solve_maxmin, SamplingParams, SolverConfig};

fn main() -> wpcn::Result<()> {
    let eps = 1e-3;
    let tight = SolverConfig::default();
    let matched = SolverConfig::matched_accuracy(eps);
    let draws = 10;
    println!("mean over {draws} scenarios, ms, relative accuracy {eps}");
    println!("   K   proposed   nested sg   joint sg   worst proposed error");
    for k in [4, 8, 16, 32] {
        let (mut t_proposed, mut t_nested, mut t_joint, mut worst) = (0.0, 0.0, 0.0, 0.0f64);
        for seed in 0..draws {
            let scenario = sample_scenario(k, &SamplingParams::default(), 100 * k as u64 + seed)?;
            let reference = solve_maxmin(&scenario, &tight)?.common_rate;

            let start = Instant::now();
            let proposed = solve_maxmin(&scenario, &matched)?;
            t_proposed += start.elapsed().as_secs_f64();
            t_nested += subgradient_maxmin_nested(&scenario, eps, &tight)?.wall_time;
            t_joint += subgradient_maxmin_joint_to_target(&scenario, reference * (1.0 - eps), &tight)?.wall_time;
            worst = worst.max((reference - proposed.common_rate).abs() / reference);
        }
        let ms = |t: f64| t * 1e3 / draws as f64;
        println!(
            "{k:4} {:10.3} {:11.3} {:10.3}   {worst:.1e}",
            ms(t_proposed),
            ms(t_nested),
            ms(t_joint)
        );
    }
    Ok(())
}
