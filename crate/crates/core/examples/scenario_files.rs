//! Writing a scenario to TOML, editing it and solving the result.
//!
//! `cargo run --example scenario_files`

use wpcn::{sample_scenario, solve_maxmin, SamplingParams, Scenario, SolverConfig, UserLink};

fn main() -> wpcn::Result<()> {
    let scenario = sample_scenario(3, &SamplingParams::default(), 11)?;
    let text = scenario.to_toml_string()?;
    println!("{text}");

    // move the first user to 2 m, keeping its fading draw
    let mut users = Scenario::from_toml_str(&text)?.users().to_vec();
    let first = users[0];
    users[0] = UserLink::from_path_loss(2.0, first.fading_power, first.harvest_efficiency, first.noise_power_w);
    let closer = Scenario::new(scenario.p_max_w(), scenario.snr_gap(), users)?;
    let cfg = SolverConfig::default();
    println!("common rate before: {:.6e}", solve_maxmin(&scenario, &cfg)?.common_rate);
    println!("common rate after : {:.6e}", solve_maxmin(&closer, &cfg)?.common_rate);

    let path = std::env::temp_dir().join("wpcn-example-scenario.toml");
    closer.save(&path)?;
    println!("saved to {}", path.display());
    Ok(())
}
