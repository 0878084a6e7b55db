//! Runtime experiment with CSV output.
//!
//! `cargo run --release --example runtime_scaling -- /tmp/runtime.csv`

use wpcn::bench::{run_fig3, ExperimentConfig};

fn main() -> wpcn::Result<()> {
    let output_path = std::env::args().nth(1).map(Into::into);
    let config = ExperimentConfig {
        trials: 20,
        k_values: vec![2, 4, 8, 16],
        output_path,
        ..ExperimentConfig::fig3()
    };
    let output = run_fig3(&config)?;
    print!("{}", output.summary_csv());
    Ok(())
}
