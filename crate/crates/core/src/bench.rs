//! Monte Carlo experiment harness and CSV output.
//!
//! Three experiments share one row schema:
//!
//! * `single` solves one scenario with one objective.
//! * `fig3` times the max-min solver against the generic subgradient baseline
//!   at a matched relative accuracy, for several user counts.
//! * `fig5` sweeps the access point's power for two users at fixed distances
//!   and records the max-min rates.
//!
//! Every trial draws its scenario from a seed derived from the master seed,
//! the experiment, the user count and the trial index, so reruns reproduce
//! every number except the wall times.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::channel::{
    dbm_from_watts, sample_scenario, sample_scenario_at_distances, SamplingParams, Scenario, TimeAllocation,
};
use crate::config::SolverConfig;
use crate::error::{invalid, Error, Result};
use crate::maxmin::solve_maxmin;
use crate::oracle::{subgradient_maxmin_joint_to_target, subgradient_maxmin_nested};
use crate::sum_throughput::allocate_closed_form;

/// Largest user count accepted by the runtime experiment.
pub const MAX_K: usize = 10_000;

pub const SOLVER_PROPOSED: &str = "proposed";
pub const SOLVER_BASELINE: &str = "subgradient";
pub const SOLVER_JOINT: &str = "joint-subgradient";
pub const SOLVER_SUM: &str = "sum-closed-form";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig3,
    Fig5,
    Single,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig3 => "fig3",
            Experiment::Fig5 => "fig5",
            Experiment::Single => "single",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Experiment::Fig3 => 3,
            Experiment::Fig5 => 5,
            Experiment::Single => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Sum,
    MaxMin,
}

/// Settings of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub trials: usize,
    pub seed: u64,
    /// User counts for the runtime experiment.
    pub k_values: Vec<usize>,
    /// Power sweep for the fairness experiment.
    pub p_max_dbm_values: Vec<f64>,
    /// The two user distances of the fairness experiment.
    pub fixed_distances_m: Vec<f64>,
    pub output_path: Option<PathBuf>,
    /// Channel model; `p_max_dbm` is overridden by the sweep in `fig5`.
    pub sampling: SamplingParams,
    /// Relative accuracy both solvers are held to in `fig3`.
    pub eps: f64,
    /// Timed repetitions per trial; the median is reported. Runs longer
    /// than 20 ms are measured once.
    pub repeats: usize,
    /// Also time the joint-variable subgradient in `fig3`.
    pub include_joint: bool,
    /// Tight settings for reference solves and the baseline step rule.
    pub solver: SolverConfig,
}

impl ExperimentConfig {
    /// Runtime scaling: K in {4, 8, 16, 32}, 1000 trials.
    pub fn fig3() -> Self {
        Self {
            experiment: Experiment::Fig3,
            trials: 1000,
            seed: 1,
            k_values: vec![4, 8, 16, 32],
            p_max_dbm_values: Vec::new(),
            fixed_distances_m: Vec::new(),
            output_path: None,
            sampling: SamplingParams::default(),
            eps: 1e-3,
            repeats: 3,
            include_joint: false,
            solver: SolverConfig::default(),
        }
    }

    /// Fairness vs. power: two users at 5 m and 10 m, -10 to 20 dBm, 1000 trials.
    pub fn fig5() -> Self {
        Self {
            experiment: Experiment::Fig5,
            k_values: Vec::new(),
            p_max_dbm_values: (0..7).map(|i| -10.0 + 5.0 * i as f64).collect(),
            fixed_distances_m: vec![5.0, 10.0],
            ..Self::fig3()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(invalid("repeats must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        let (d_min, d_max) = self.sampling.distance_range;
        if !(d_min > 0.0 && d_min <= d_max && d_max.is_finite()) {
            return Err(invalid(format!("bad distance range [{d_min}, {d_max}]")));
        }
        self.solver.validate()?;
        match self.experiment {
            Experiment::Fig3 => {
                if self.k_values.is_empty() {
                    return Err(invalid("fig3 needs at least one K"));
                }
                if let Some(&k) = self.k_values.iter().find(|&&k| k == 0 || k > MAX_K) {
                    return Err(invalid(format!("K must lie in [1, {MAX_K}], got {k}")));
                }
            }
            Experiment::Fig5 => {
                if self.fixed_distances_m.len() != 2 {
                    return Err(invalid(format!(
                        "fig5 needs exactly 2 distances, got {}",
                        self.fixed_distances_m.len()
                    )));
                }
                if self.p_max_dbm_values.is_empty() {
                    return Err(invalid("fig5 needs at least one power level"));
                }
                if self.p_max_dbm_values.iter().any(|p| !p.is_finite()) {
                    return Err(invalid("power levels must be finite"));
                }
            }
            Experiment::Single => {}
        }
        Ok(())
    }
}

/// One solver run on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub trial: usize,
    pub seed: u64,
    pub k: usize,
    pub p_max_dbm: f64,
    pub solver: &'static str,
    /// Sum rate or worst-user rate, bits/s/Hz.
    pub objective: f64,
    pub rates: Vec<f64>,
    pub tau0: f64,
    pub wall_time_s: f64,
    /// Golden-section steps (max-min) or zero.
    pub outer_iterations: usize,
    /// Common-rate bisections, subgradient steps or root-finder steps.
    pub inner_iterations: usize,
    pub fixed_point_iterations: usize,
}

pub const CSV_HEADER: &str = "experiment,trial,seed,k,p_max_dbm,solver,objective,rates,tau0,wall_time_s,outer_iterations,inner_iterations,fixed_point_iterations";

/// Column of [`CSV_HEADER`] that varies between reruns.
const WALL_TIME_COLUMN: usize = 9;

impl ResultRow {
    pub fn rate_spread(&self) -> f64 {
        let max = self.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.rates.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn to_csv_line(&self) -> String {
        let rates: Vec<String> = self.rates.iter().map(|&r| format_g12(r)).collect();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.trial,
            self.seed,
            self.k,
            format_g12(self.p_max_dbm),
            self.solver,
            format_g12(self.objective),
            rates.join(";"),
            format_g12(self.tau0),
            format_g12(self.wall_time_s),
            self.outer_iterations,
            self.inner_iterations,
            self.fixed_point_iterations,
        )
    }
}

/// Averages over the trials of one (K, power, solver) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: &'static str,
    pub k: usize,
    pub p_max_dbm: f64,
    pub solver: &'static str,
    pub trials: usize,
    pub mean_objective: f64,
    pub mean_wall_time_s: f64,
    pub mean_outer_iterations: f64,
    pub mean_inner_iterations: f64,
    pub mean_fixed_point_iterations: f64,
    pub max_rate_spread: f64,
    /// Mean rate of each user index.
    pub mean_rates: Vec<f64>,
}

pub const SUMMARY_HEADER: &str = "experiment,k,p_max_dbm,solver,trials,mean_objective,mean_wall_time_s,mean_outer_iterations,mean_inner_iterations,mean_fixed_point_iterations,max_rate_spread,mean_rates";

impl SummaryRow {
    pub fn to_csv_line(&self) -> String {
        let rates: Vec<String> = self.mean_rates.iter().map(|&r| format_g12(r)).collect();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.k,
            format_g12(self.p_max_dbm),
            self.solver,
            self.trials,
            format_g12(self.mean_objective),
            format_g12(self.mean_wall_time_s),
            format_g12(self.mean_outer_iterations),
            format_g12(self.mean_inner_iterations),
            format_g12(self.mean_fixed_point_iterations),
            format_g12(self.max_rate_spread),
            rates.join(";"),
        )
    }
}

/// Rows of an experiment plus their per-cell averages.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentOutput {
    fn from_rows(rows: Vec<ResultRow>) -> Self {
        let summary = summarize(&rows);
        Self { rows, summary }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for row in &self.summary {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        out
    }

    /// Summary cell for a solver at a user count and power level.
    pub fn cell(&self, solver: &str, k: usize, p_max_dbm: f64) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.solver == solver && s.k == k && s.p_max_dbm == p_max_dbm)
    }
}

/// Summary rows in first-seen order of (K, power, solver).
fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut cells: Vec<(usize, f64, &'static str, Vec<&ResultRow>)> = Vec::new();
    for row in rows {
        match cells
            .iter_mut()
            .find(|(k, p, s, _)| *k == row.k && *p == row.p_max_dbm && *s == row.solver)
        {
            Some(cell) => cell.3.push(row),
            None => cells.push((row.k, row.p_max_dbm, row.solver, vec![row])),
        }
    }
    cells
        .into_iter()
        .map(|(k, p_max_dbm, solver, members)| {
            let n = members.len() as f64;
            let mean = |f: &dyn Fn(&ResultRow) -> f64| members.iter().map(|r| f(r)).sum::<f64>() / n;
            let mean_rates = (0..k)
                .map(|i| {
                    members
                        .iter()
                        .map(|r| r.rates.get(i).copied().unwrap_or(0.0))
                        .sum::<f64>()
                        / n
                })
                .collect();
            SummaryRow {
                experiment: members[0].experiment,
                k,
                p_max_dbm,
                solver,
                trials: members.len(),
                mean_objective: mean(&|r| r.objective),
                mean_wall_time_s: mean(&|r| r.wall_time_s),
                mean_outer_iterations: mean(&|r| r.outer_iterations as f64),
                mean_inner_iterations: mean(&|r| r.inner_iterations as f64),
                mean_fixed_point_iterations: mean(&|r| r.fixed_point_iterations as f64),
                max_rate_spread: members.iter().map(|r| r.rate_spread()).fold(0.0, f64::max),
                mean_rates,
            }
        })
        .collect()
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// exponent notation outside `[1e-4, 1e12)`.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // the exponent after rounding to 12 digits decides the style
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exponent) {
        let decimals = (DIGITS - 1 - exponent) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exponent.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV text with the wall-time column removed: the part reruns must reproduce.
pub fn numeric_payload(csv: &str) -> String {
    let mut out = String::with_capacity(csv.len());
    for line in csv.lines() {
        let kept: Vec<&str> = line
            .split(',')
            .enumerate()
            .filter(|&(i, _)| i != WALL_TIME_COLUMN)
            .map(|(_, field)| field)
            .collect();
        let _ = writeln!(out, "{}", kept.join(","));
    }
    out
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial. The power level is deliberately not an input, so a
/// power sweep sees the same fading draws at every level.
pub fn trial_seed(master: u64, experiment: Experiment, k: usize, trial: usize) -> u64 {
    [experiment.tag(), k as u64, trial as u64]
        .into_iter()
        .fold(splitmix64(master), |acc, part| splitmix64(acc ^ part))
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}

/// Single measurements at least this long are not repeated: scheduler jitter
/// is negligible next to them.
const LONG_MEASUREMENT_S: f64 = 0.02;

/// Runs `solve` up to `repeats` times; returns the first result and the median time.
///
/// `solve` reports its own measured time so callers can exclude set-up work.
fn timed<T>(repeats: usize, mut solve: impl FnMut() -> Result<(T, f64)>) -> Result<(T, f64)> {
    let (first, t0) = solve()?;
    let mut times = vec![t0];
    if t0 >= LONG_MEASUREMENT_S {
        return Ok((first, t0));
    }
    for _ in 1..repeats {
        times.push(solve()?.1);
    }
    Ok((first, median(times)))
}

/// Opens the CSV targets up front so a bad path fails before any solving.
struct Sinks {
    rows: Option<(PathBuf, File)>,
    summary: Option<(PathBuf, File)>,
}

impl Sinks {
    fn open(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self {
                rows: None,
                summary: None,
            });
        };
        let summary_path = summary_path(path);
        let open = |p: &Path| File::create(p).map_err(|e| Error::Io(format!("cannot write {}: {e}", p.display())));
        Ok(Self {
            rows: Some((path.to_path_buf(), open(path)?)),
            summary: Some((summary_path.clone(), open(&summary_path)?)),
        })
    }

    fn write(self, output: &ExperimentOutput) -> Result<()> {
        for (sink, text) in [(self.rows, output.to_csv()), (self.summary, output.summary_csv())] {
            if let Some((path, mut file)) = sink {
                file.write_all(text.as_bytes())
                    .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
            }
        }
        Ok(())
    }
}

/// `out.csv` -> `out.summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.summary.csv"))
}

/// A solved single scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleOutcome {
    pub row: ResultRow,
    pub allocation: TimeAllocation,
}

/// Solves one scenario and returns its row (trial 0) and allocation.
pub fn run_single(scenario: &Scenario, objective: Objective, cfg: &SolverConfig, seed: u64) -> Result<SingleOutcome> {
    let start = Instant::now();
    let (row, allocation) = match objective {
        Objective::Sum => {
            let s = allocate_closed_form(scenario, cfg)?;
            let row = ResultRow {
                experiment: Experiment::Single.name(),
                trial: 0,
                seed,
                k: scenario.k(),
                p_max_dbm: dbm_from_watts(scenario.p_max_w()),
                solver: SOLVER_SUM,
                objective: s.sum_rate,
                rates: s.per_user_rate,
                tau0: s.allocation.tau0,
                wall_time_s: 0.0,
                outer_iterations: 0,
                inner_iterations: s.iterations,
                fixed_point_iterations: 0,
            };
            (row, s.allocation)
        }
        Objective::MaxMin => {
            let s = solve_maxmin(scenario, cfg)?;
            let row = ResultRow {
                experiment: Experiment::Single.name(),
                trial: 0,
                seed,
                k: scenario.k(),
                p_max_dbm: dbm_from_watts(scenario.p_max_w()),
                solver: SOLVER_PROPOSED,
                objective: s.common_rate,
                rates: s.per_user_rate,
                tau0: s.allocation.tau0,
                wall_time_s: 0.0,
                outer_iterations: s.outer_iterations,
                inner_iterations: s.bisection_iterations,
                fixed_point_iterations: s.total_fixed_point_iterations,
            };
            (row, s.allocation)
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    Ok(SingleOutcome {
        row: ResultRow { wall_time_s, ..row },
        allocation,
    })
}

/// Runtime scaling of the max-min solver against the subgradient baseline.
///
/// Per trial: the proposed solver runs with [`SolverConfig::matched_accuracy`];
/// the baseline reuses the same golden-section search over `tau0` with the
/// subgradient inner solver stopped at relative accuracy `eps`. Timing covers
/// the solver calls only and is serial.
pub fn run_fig3(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    if config.experiment != Experiment::Fig3 {
        return Err(invalid("run_fig3 needs a fig3 configuration"));
    }
    let sinks = Sinks::open(config.output_path.as_deref())?;
    let matched = SolverConfig {
        subgrad_step_a: config.solver.subgrad_step_a,
        subgrad_step_b: config.solver.subgrad_step_b,
        subgrad_max_iter: config.solver.subgrad_max_iter,
        ..SolverConfig::matched_accuracy(config.eps)
    };
    let p_max_dbm = config.sampling.p_max_dbm;
    let mut rows = Vec::new();

    for &k in &config.k_values {
        for trial in 0..config.trials {
            let seed = trial_seed(config.seed, Experiment::Fig3, k, trial);
            let scenario = sample_scenario(k, &config.sampling, seed)?;
            let base = |solver, objective, rates, tau0, wall_time_s| ResultRow {
                experiment: Experiment::Fig3.name(),
                trial,
                seed,
                k,
                p_max_dbm,
                solver,
                objective,
                rates,
                tau0,
                wall_time_s,
                outer_iterations: 0,
                inner_iterations: 0,
                fixed_point_iterations: 0,
            };

            let (proposed, t) = timed(config.repeats, || {
                let start = Instant::now();
                let s = solve_maxmin(&scenario, &matched)?;
                Ok((s, start.elapsed().as_secs_f64()))
            })?;
            rows.push(ResultRow {
                outer_iterations: proposed.outer_iterations,
                inner_iterations: proposed.bisection_iterations,
                fixed_point_iterations: proposed.total_fixed_point_iterations,
                ..base(
                    SOLVER_PROPOSED,
                    proposed.common_rate,
                    proposed.per_user_rate,
                    proposed.allocation.tau0,
                    t,
                )
            });

            let (baseline, t) = timed(config.repeats, || {
                let r = subgradient_maxmin_nested(&scenario, config.eps, &config.solver)?;
                let t = r.wall_time;
                Ok((r, t))
            })?;
            rows.push(ResultRow {
                inner_iterations: baseline.iterations,
                ..base(
                    SOLVER_BASELINE,
                    baseline.objective,
                    baseline.allocation.rates(&scenario),
                    baseline.allocation.tau0,
                    t,
                )
            });

            if config.include_joint {
                let reference = solve_maxmin(&scenario, &config.solver)?.common_rate;
                let (joint, t) = timed(config.repeats, || {
                    let r =
                        subgradient_maxmin_joint_to_target(&scenario, reference * (1.0 - config.eps), &config.solver)?;
                    let t = r.wall_time;
                    Ok((r, t))
                })?;
                rows.push(ResultRow {
                    inner_iterations: joint.iterations,
                    ..base(
                        SOLVER_JOINT,
                        joint.objective,
                        joint.allocation.rates(&scenario),
                        joint.allocation.tau0,
                        t,
                    )
                });
            }
        }
    }

    let output = ExperimentOutput::from_rows(rows);
    sinks.write(&output)?;
    Ok(output)
}

/// Max-min rates of two users at fixed distances over a power sweep.
///
/// Only the fading is random; the trial seed ignores the power level, so
/// every level sees the same channel draws.
pub fn run_fig5(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    if config.experiment != Experiment::Fig5 {
        return Err(invalid("run_fig5 needs a fig5 configuration"));
    }
    let sinks = Sinks::open(config.output_path.as_deref())?;
    let k = config.fixed_distances_m.len();
    let mut rows = Vec::new();

    for &p_max_dbm in &config.p_max_dbm_values {
        let params = SamplingParams {
            p_max_dbm,
            ..config.sampling
        };
        for trial in 0..config.trials {
            let seed = trial_seed(config.seed, Experiment::Fig5, k, trial);
            let scenario = sample_scenario_at_distances(&config.fixed_distances_m, &params, seed)?;
            let start = Instant::now();
            let s = solve_maxmin(&scenario, &config.solver)?;
            let wall_time_s = start.elapsed().as_secs_f64();
            rows.push(ResultRow {
                experiment: Experiment::Fig5.name(),
                trial,
                seed,
                k,
                p_max_dbm,
                solver: SOLVER_PROPOSED,
                objective: s.common_rate,
                rates: s.per_user_rate,
                tau0: s.allocation.tau0,
                wall_time_s,
                outer_iterations: s.outer_iterations,
                inner_iterations: s.bisection_iterations,
                fixed_point_iterations: s.total_fixed_point_iterations,
            });
        }
    }

    let output = ExperimentOutput::from_rows(rows);
    sinks.write(&output)?;
    Ok(output)
}
