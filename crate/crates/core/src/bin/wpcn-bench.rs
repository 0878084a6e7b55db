//! Command-line front end: `single`, `fig3` and `fig5`.
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when a solver
//! fails to converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wpcn::bench::{self, Experiment, ExperimentConfig, Objective, CSV_HEADER};
use wpcn::{channel, Error, SamplingParams, Scenario, SolverConfig};

#[derive(Parser)]
#[command(
    name = "wpcn-bench",
    version,
    about = "Time allocation for wireless powered networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and print the allocation.
    Single(SingleArgs),
    /// Runtime of the max-min solver vs. the subgradient baseline over K.
    Fig3(Fig3Args),
    /// Max-min rates of two users over a power sweep.
    Fig5(Fig5Args),
}

#[derive(Args)]
struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// HAP transmit power in dBm (fig5 takes a comma-separated list).
    #[arg(long = "pmax-dbm", value_delimiter = ',', allow_hyphen_values = true)]
    pmax_dbm: Vec<f64>,
    /// SNR gap in dB.
    #[arg(long = "gap-db", default_value_t = 9.8)]
    gap_db: f64,
    /// Receiver noise power in dBm.
    #[arg(long = "noise-dbm", default_value_t = -100.0, allow_hyphen_values = true)]
    noise_dbm: f64,
    /// Energy harvesting efficiency.
    #[arg(long, default_value_t = 0.5)]
    xi: f64,
    /// Write CSV rows here (a `.summary.csv` sibling holds the averages).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SingleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Maxmin)]
    objective: ObjectiveArg,
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "gamma")]
    scenario: Option<PathBuf>,
    /// Inline per-user SNR coefficients, comma-separated.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Number of users of a randomly drawn scenario.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long = "dist-min", default_value_t = 5.0)]
    dist_min: f64,
    #[arg(long = "dist-max", default_value_t = 20.0)]
    dist_max: f64,
}

#[derive(Args)]
struct Fig3Args {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// User counts, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32])]
    k: Vec<usize>,
    #[arg(long = "dist-min", default_value_t = 5.0)]
    dist_min: f64,
    #[arg(long = "dist-max", default_value_t = 20.0)]
    dist_max: f64,
    /// Relative accuracy both solvers must reach.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Timed repetitions per trial (median reported).
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Also time the joint-variable subgradient baseline.
    #[arg(long)]
    joint: bool,
}

#[derive(Args)]
struct Fig5Args {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Distance of user 1 in meters.
    #[arg(long, default_value_t = 5.0)]
    d1: f64,
    /// Distance of user 2 in meters.
    #[arg(long, default_value_t = 10.0)]
    d2: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Sum,
    Maxmin,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Single(args) => single(args),
        Command::Fig3(args) => fig3(args),
        Command::Fig5(args) => fig5(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Convergence { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn one_power(values: &[f64]) -> wpcn::Result<f64> {
    match values {
        [] => Ok(SamplingParams::default().p_max_dbm),
        [p] => Ok(*p),
        _ => Err(Error::InvalidParameter("--pmax-dbm takes a single value here".into())),
    }
}

fn sampling(common: &Common, p_max_dbm: f64, distance_range: (f64, f64)) -> SamplingParams {
    SamplingParams {
        distance_range,
        p_max_dbm,
        snr_gap_db: common.gap_db,
        noise_dbm: common.noise_dbm,
        harvest_efficiency: common.xi,
    }
}

fn single(args: SingleArgs) -> wpcn::Result<()> {
    let scenario = if let Some(path) = &args.scenario {
        Scenario::load(path)?
    } else if !args.gamma.is_empty() {
        Scenario::from_gamma(&args.gamma)?
    } else {
        let p = one_power(&args.common.pmax_dbm)?;
        let params = sampling(&args.common, p, (args.dist_min, args.dist_max));
        channel::sample_scenario(args.k, &params, args.common.seed)?
    };
    let objective = match args.objective {
        ObjectiveArg::Sum => Objective::Sum,
        ObjectiveArg::Maxmin => Objective::MaxMin,
    };
    let outcome = bench::run_single(&scenario, objective, &SolverConfig::default(), args.common.seed)?;
    let row = &outcome.row;

    println!("solver      {}", row.solver);
    println!("users       {}", row.k);
    println!("objective   {:.9} bit/s/Hz", row.objective);
    println!("tau0        {:.6}", row.tau0);
    for (i, (tau, rate)) in outcome.allocation.tau.iter().zip(&row.rates).enumerate() {
        println!("user {:<6} tau {tau:.6}  rate {rate:.9}", i + 1);
    }
    println!(
        "iterations  outer {} inner {} fixed-point {}",
        row.outer_iterations, row.inner_iterations, row.fixed_point_iterations
    );
    println!("wall time   {:.3e} s", row.wall_time_s);

    if let Some(path) = &args.common.out {
        let text = format!("{CSV_HEADER}\n{}\n", row.to_csv_line());
        std::fs::write(path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn fig3(args: Fig3Args) -> wpcn::Result<()> {
    let p = one_power(&args.common.pmax_dbm)?;
    let config = ExperimentConfig {
        trials: args.trials,
        seed: args.common.seed,
        k_values: args.k,
        output_path: args.common.out.clone(),
        sampling: sampling(&args.common, p, (args.dist_min, args.dist_max)),
        eps: args.eps,
        repeats: args.repeats,
        include_joint: args.joint,
        ..ExperimentConfig::fig3()
    };
    let output = bench::run_fig3(&config)?;
    print!("{}", output.summary_csv());
    Ok(())
}

fn fig5(args: Fig5Args) -> wpcn::Result<()> {
    let defaults = ExperimentConfig::fig5();
    let config = ExperimentConfig {
        experiment: Experiment::Fig5,
        trials: args.trials,
        seed: args.common.seed,
        p_max_dbm_values: if args.common.pmax_dbm.is_empty() {
            defaults.p_max_dbm_values.clone()
        } else {
            args.common.pmax_dbm.clone()
        },
        fixed_distances_m: vec![args.d1, args.d2],
        output_path: args.common.out.clone(),
        sampling: sampling(&args.common, 0.0, defaults.sampling.distance_range),
        ..defaults
    };
    let output = bench::run_fig5(&config)?;
    print!("{}", output.summary_csv());
    Ok(())
}
