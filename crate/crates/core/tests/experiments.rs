use wpcn::bench::{self, numeric_payload, ExperimentConfig, SOLVER_BASELINE, SOLVER_PROPOSED};

fn small_fig3() -> ExperimentConfig {
    ExperimentConfig {
        trials: 2,
        seed: 42,
        k_values: vec![2],
        repeats: 1,
        ..ExperimentConfig::fig3()
    }
}

#[test]
fn fig3_two_trials_give_four_rows() {
    let out = bench::run_fig3(&small_fig3()).unwrap();
    assert_eq!(out.rows.len(), 4);
    let solvers: Vec<&str> = out.rows.iter().map(|r| r.solver).collect();
    assert_eq!(
        solvers,
        [SOLVER_PROPOSED, SOLVER_BASELINE, SOLVER_PROPOSED, SOLVER_BASELINE]
    );
    assert_eq!(out.summary.len(), 2);
    for row in &out.rows {
        assert!(row.objective.is_finite() && row.objective > 0.0);
        assert!(row.wall_time_s >= 0.0);
        assert_eq!(row.rates.len(), 2);
    }
}

#[test]
fn fig3_solvers_agree_to_matched_accuracy() {
    let out = bench::run_fig3(&ExperimentConfig {
        k_values: vec![3, 5],
        trials: 3,
        ..small_fig3()
    })
    .unwrap();
    for pair in out.rows.chunks(2) {
        let rel = (pair[0].objective - pair[1].objective).abs() / pair[0].objective;
        assert!(rel <= 2e-3, "{rel}");
    }
}

#[test]
fn fig3_joint_rows_are_optional() {
    let out = bench::run_fig3(&ExperimentConfig {
        include_joint: true,
        ..small_fig3()
    })
    .unwrap();
    assert_eq!(out.rows.len(), 6);
    assert_eq!(out.rows[2].solver, bench::SOLVER_JOINT);
}

#[test]
fn fig3_numeric_payload_is_reproducible() {
    let a = bench::run_fig3(&small_fig3()).unwrap().to_csv();
    let b = bench::run_fig3(&small_fig3()).unwrap().to_csv();
    assert_eq!(numeric_payload(&a), numeric_payload(&b));
    let c = bench::run_fig3(&ExperimentConfig {
        seed: 43,
        ..small_fig3()
    })
    .unwrap()
    .to_csv();
    assert_ne!(numeric_payload(&a), numeric_payload(&c));
}

#[test]
fn fig5_rows_cover_every_power_level() {
    let config = ExperimentConfig {
        trials: 3,
        seed: 7,
        ..ExperimentConfig::fig5()
    };
    let out = bench::run_fig5(&config).unwrap();
    assert_eq!(out.rows.len(), 3 * config.p_max_dbm_values.len());
    for row in &out.rows {
        assert!(row.rate_spread() <= 1e-3);
    }
    // fading is shared across the sweep, so every trial's rate grows with power
    for trial in 0..3 {
        let rates: Vec<f64> = out
            .rows
            .iter()
            .filter(|r| r.trial == trial)
            .map(|r| r.objective)
            .collect();
        assert!(rates.windows(2).all(|w| w[1] > w[0]), "{rates:?}");
    }
}

#[test]
fn fig5_single_trial_is_reproducible() {
    let config = ExperimentConfig {
        trials: 1,
        seed: 3,
        ..ExperimentConfig::fig5()
    };
    let a = bench::run_fig5(&config).unwrap().to_csv();
    let b = bench::run_fig5(&config).unwrap().to_csv();
    assert_eq!(numeric_payload(&a), numeric_payload(&b));
}

#[test]
fn experiments_reject_bad_configs() {
    assert!(bench::run_fig5(&ExperimentConfig {
        fixed_distances_m: vec![5.0, 10.0, 15.0],
        ..ExperimentConfig::fig5()
    })
    .is_err());
    assert!(bench::run_fig3(&ExperimentConfig::fig5()).is_err());
    assert!(bench::run_fig3(&ExperimentConfig {
        k_values: vec![0],
        ..small_fig3()
    })
    .is_err());
}

#[test]
fn unwritable_path_fails_before_solving() {
    let config = ExperimentConfig {
        output_path: Some("/no/such/dir/out.csv".into()),
        trials: 1_000_000,
        ..small_fig3()
    };
    let start = std::time::Instant::now();
    assert!(matches!(bench::run_fig3(&config), Err(wpcn::Error::Io(_))));
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn csv_files_match_returned_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = bench::run_fig3(&ExperimentConfig {
        output_path: Some(path.clone()),
        ..small_fig3()
    })
    .unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out.to_csv());
    assert_eq!(
        std::fs::read_to_string(bench::summary_path(&path)).unwrap(),
        out.summary_csv()
    );
}
