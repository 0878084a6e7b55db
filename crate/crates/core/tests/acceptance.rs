//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run alone with `cargo test -p wpcn --test acceptance`.

mod common;

use std::f64::consts::E;
use std::time::Instant;

use rand::Rng;
use wpcn::bench::{self, ExperimentConfig, SOLVER_BASELINE, SOLVER_PROPOSED};
use wpcn::maxmin::concavity_gap;
use wpcn::oracle::{grid_maxmin_oracle, GridSpec};
use wpcn::sum_throughput::allocate_golden_section;
use wpcn::{allocate_closed_form, fixed_point_tau, g_concavity_probe, solve_maxmin, solve_z, Scenario, SolverConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("sum-rate closed form matches golden-section route", sum_routes_agree),
        ("z root analytic anchors", z_anchors),
        ("equal SNR at every sum-rate optimum", equal_snr),
        ("max-min optimum matches 1e-3 grid for K=2", maxmin_grid),
        ("equal throughput at max-min optimum", equal_throughput),
        ("single user: sum and max-min allocations coincide", single_user),
        ("fixed-point slot solve matches bisection", fixed_point_vs_bisection),
        ("midpoint concavity of the common-rate curve", concavity),
        (
            "max-min solver outruns subgradient baseline, gap widening with K",
            runtime_ordering,
        ),
        ("common rate increases with access-point power", fairness_vs_power),
        ("reruns reproduce every CSV number", determinism),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!result.pass);
        println!(
            "[{verdict}] {:>2}. {name}: {} ({:.1} s)",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn sum_scenarios() -> Vec<Scenario> {
    let mut rng = common::rng(11);
    (0..1000)
        .map(|i| common::physical_scenario(&mut rng, 1 + i % 16))
        .collect()
}

fn sum_routes_agree() -> Outcome {
    let scenarios = sum_scenarios();
    let cfg = SolverConfig::default();
    let start = Instant::now();
    let (mut worst_obj, mut worst_alloc) = (0.0f64, 0.0f64);
    for s in &scenarios {
        let closed = allocate_closed_form(s, &cfg).unwrap();
        let golden = allocate_golden_section(s, &cfg).unwrap();
        worst_obj = worst_obj.max((closed.sum_rate - golden.sum_rate).abs());
        worst_alloc = worst_alloc.max(closed.allocation.max_abs_diff(&golden.allocation));
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        worst_obj <= 1e-6 && worst_alloc <= 1e-4 && elapsed < 5.0,
        format!("1000 scenarios, max |dR| {worst_obj:.2e} (<= 1e-6), max |dtau| {worst_alloc:.2e} (<= 1e-4), {elapsed:.2} s (< 5 s)"),
    )
}

fn z_anchors() -> Outcome {
    let e1 = (solve_z(1.0, 1e-12).unwrap() - E).abs();
    let e2 = (solve_z(E * E + 1.0, 1e-12).unwrap() - E * E).abs();
    outcome(
        e1 <= 1e-9 && e2 <= 1e-9,
        format!("|z(1) - e| {e1:.1e}, |z(e^2+1) - e^2| {e2:.1e} (<= 1e-9)"),
    )
}

fn equal_snr() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for s in sum_scenarios() {
        let sol = allocate_closed_form(&s, &cfg).unwrap();
        let target = sol.z_star - 1.0;
        for (g, t) in s.gamma().iter().zip(&sol.allocation.tau) {
            let snr = g * sol.allocation.tau0 / t;
            worst = worst.max((snr - target).abs() / target);
        }
    }
    outcome(
        worst <= 1e-6,
        format!("1000 scenarios, max relative deviation {worst:.2e} (<= 1e-6)"),
    )
}

fn maxmin_grid() -> Outcome {
    let mut rng = common::rng(44);
    let cfg = SolverConfig::default();
    let grid = GridSpec::new(1e-3, 2).unwrap();
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut above_grid = 0;
    for _ in 0..100 {
        let s = common::gamma_scenario(&mut rng, 2, 1e-2, 1e2);
        let sol = solve_maxmin(&s, &cfg).unwrap();
        let (_, grid_best) = grid_maxmin_oracle(&s, &grid).unwrap();
        worst = worst.max((sol.common_rate - grid_best).abs());
        above_grid += usize::from(sol.common_rate >= grid_best);
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        worst <= 2e-3 && elapsed < 60.0,
        format!("100 scenarios, max |R - R_grid| {worst:.2e} (<= 2e-3), solver >= grid in {above_grid}/100, {elapsed:.1} s (< 60 s)"),
    )
}

fn equal_throughput() -> Outcome {
    let mut rng = common::rng(55);
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    let mut largest_rate = 0.0f64;
    for i in 0..1000 {
        let s = common::physical_scenario(&mut rng, 2 + i % 9);
        let sol = solve_maxmin(&s, &cfg).unwrap();
        worst = worst.max(sol.rate_spread());
        largest_rate = largest_rate.max(sol.common_rate);
    }
    outcome(
        worst <= 1e-3,
        format!("1000 scenarios K=2..10, max spread {worst:.2e} (<= 1e-3), common rates up to {largest_rate:.2}"),
    )
}

fn single_user() -> Outcome {
    let mut rng = common::rng(66);
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let s = common::gamma_scenario(&mut rng, 1, 1e-3, 1e3);
        let sum = allocate_closed_form(&s, &cfg).unwrap();
        let fair = solve_maxmin(&s, &cfg).unwrap();
        worst = worst.max(sum.allocation.max_abs_diff(&fair.allocation));
    }
    outcome(
        worst <= 1e-5,
        format!("200 scenarios, max |dtau| {worst:.2e} (<= 1e-5)"),
    )
}

fn fixed_point_vs_bisection() -> Outcome {
    let mut rng = common::rng(77);
    let cfg = SolverConfig::default();
    let n = 10_000;
    let (mut worst, mut fallbacks, mut errors) = (0.0f64, 0, 0);
    for _ in 0..n {
        let gamma = common::log_uniform(&mut rng, 1e-3, 1e3);
        let tau0 = rng.gen_range(0.01..0.99);
        let r_bar = rng.gen_range(0.01..0.99) * common::rate(gamma, tau0, 1.0 - tau0);
        let expected = common::slot_for_rate(gamma, tau0, r_bar);
        match fixed_point_tau(gamma, tau0, r_bar, &cfg) {
            Ok(solve) => {
                worst = worst.max((solve.tau - expected).abs());
                fallbacks += usize::from(solve.fell_back);
            }
            Err(_) => errors += 1,
        }
    }
    outcome(
        worst <= 1e-8 && errors == 0,
        format!(
            "{n} triples, max |dtau| {worst:.2e} (<= 1e-8), fallback rate {:.2}%, errors {errors}",
            100.0 * fallbacks as f64 / n as f64
        ),
    )
}

fn concavity() -> Outcome {
    let mut rng = common::rng(88);
    let cfg = SolverConfig::default();
    let slack = 10.0 * cfg.rate_tol;
    let mut passed = 0;
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let s = common::physical_scenario(&mut rng, 2 + i % 7);
        passed += usize::from(g_concavity_probe(&s, 100, &cfg, 1000 + i as u64));
        if i < 10 {
            // relative violation on a subset, for the log
            for _ in 0..20 {
                let (t1, t2, theta) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
                let gap = concavity_gap(&s, t1, t2, theta, &cfg).unwrap();
                let scale = solve_maxmin(&s, &cfg).unwrap().common_rate.max(f64::MIN_POSITIVE);
                worst = worst.min(gap / scale);
            }
        }
    }
    outcome(
        passed == 100,
        format!("{passed}/100 scenarios pass 100 probes within {slack:.0e}; smallest gap/R* on a subset {worst:.1e}"),
    )
}

fn runtime_ordering() -> Outcome {
    let config = ExperimentConfig {
        trials: 200,
        seed: 2024,
        ..ExperimentConfig::fig3()
    };
    let output = bench::run_fig3(&config).unwrap();
    let mut ratios = Vec::new();
    let mut faster_everywhere = true;
    let mut worst_mismatch = 0.0f64;
    let mut cells = Vec::new();
    for &k in &config.k_values {
        let p = output.cell(SOLVER_PROPOSED, k, config.sampling.p_max_dbm).unwrap();
        let b = output.cell(SOLVER_BASELINE, k, config.sampling.p_max_dbm).unwrap();
        faster_everywhere &= p.mean_wall_time_s < b.mean_wall_time_s;
        let ratio = b.mean_wall_time_s / p.mean_wall_time_s;
        ratios.push(ratio);
        cells.push(format!(
            "K={k}: {:.2} ms vs {:.2} ms (x{ratio:.1})",
            p.mean_wall_time_s * 1e3,
            b.mean_wall_time_s * 1e3
        ));
    }
    // both solvers must land within the matched accuracy of each other
    for pair in output.rows.chunks(2) {
        let (p, b) = (&pair[0], &pair[1]);
        worst_mismatch = worst_mismatch.max((p.objective - b.objective).abs() / p.objective);
    }
    let growing = ratios.windows(2).all(|w| w[1] > w[0]);
    let matched = worst_mismatch <= 2.0 * config.eps;
    outcome(
        faster_everywhere && growing && matched,
        format!(
            "200 trials; {}; ratio growing: {growing}; max relative objective gap {worst_mismatch:.1e} (<= 2e-3)",
            cells.join(", ")
        ),
    )
}

fn fairness_vs_power() -> Outcome {
    let config = ExperimentConfig {
        seed: 2024,
        ..ExperimentConfig::fig5()
    };
    let output = bench::run_fig5(&config).unwrap();
    let means: Vec<f64> = config
        .p_max_dbm_values
        .iter()
        .map(|&p| output.cell(SOLVER_PROPOSED, 2, p).unwrap().mean_objective)
        .collect();
    let spread = output.summary.iter().map(|s| s.max_rate_spread).fold(0.0, f64::max);
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let listed: Vec<String> = means.iter().map(|m| format!("{m:.4}")).collect();
    outcome(
        increasing && spread <= 1e-3,
        format!(
            "1000 trials per level, mean common rate [{}] over -10..20 dBm, max |R1 - R2| {spread:.1e}",
            listed.join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run_twice = |make: &dyn Fn(std::path::PathBuf) -> ExperimentConfig,
                     run: fn(&ExperimentConfig) -> wpcn::Result<bench::ExperimentOutput>| {
        let a = make(dir.path().join("a.csv"));
        let b = make(dir.path().join("b.csv"));
        run(&a).unwrap();
        run(&b).unwrap();
        let read = |c: &ExperimentConfig| std::fs::read_to_string(c.output_path.as_ref().unwrap()).unwrap();
        let (ta, tb) = (read(&a), read(&b));
        let rows = ta.lines().count() - 1;
        (bench::numeric_payload(&ta) == bench::numeric_payload(&tb), rows)
    };
    let (fig3_same, fig3_rows) = run_twice(
        &|out| ExperimentConfig {
            trials: 5,
            seed: 9,
            k_values: vec![2, 4, 8],
            output_path: Some(out),
            repeats: 1,
            ..ExperimentConfig::fig3()
        },
        bench::run_fig3,
    );
    let (fig5_same, fig5_rows) = run_twice(
        &|out| ExperimentConfig {
            trials: 10,
            seed: 9,
            output_path: Some(out),
            ..ExperimentConfig::fig5()
        },
        bench::run_fig5,
    );
    outcome(
        fig3_same && fig5_same,
        format!("fig3 ({fig3_rows} rows) identical: {fig3_same}; fig5 ({fig5_rows} rows) identical: {fig5_same}"),
    )
}
