//! Two users at 5 m and 10 m: max-min rates over the access point's power.
//!
//! `cargo run --release --example fairness_vs_power`

use wpcn::bench::{run_fig5, ExperimentConfig};

fn main() -> wpcn::Result<()> {
    let config = ExperimentConfig {
        trials: 200,
        ..ExperimentConfig::fig5()
    };
    let output = run_fig5(&config)?;
    println!("p_max_dbm   mean R1      mean R2      max |R1-R2|");
    for cell in &output.summary {
        println!(
            "{:9} {:12.6} {:12.6} {:12.1e}",
            cell.p_max_dbm, cell.mean_rates[0], cell.mean_rates[1], cell.max_rate_spread
        );
    }
    Ok(())
}
