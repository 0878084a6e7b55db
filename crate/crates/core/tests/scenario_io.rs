use wpcn::channel::{sample_scenario_at_distances, UserLink};
use wpcn::{allocate_closed_form, sample_scenario, SamplingParams, Scenario, SolverConfig};

#[test]
fn saved_scenario_reloads_with_same_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let s = sample_scenario(5, &SamplingParams::default(), 12).unwrap();
    s.save(&path).unwrap();
    let back = Scenario::load(&path).unwrap();
    assert_eq!(back.k(), 5);
    for (a, b) in s.gamma().iter().zip(back.gamma()) {
        assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
    }
}

#[test]
fn hand_written_file_solves() {
    let text = r#"
p_max_dbm = 30.0
snr_gap_db = 0.0

[[users]]
distance_m = 5.0
fading_power = 1.0
harvest_efficiency = 0.5
dl_gain = 4e-5
ul_gain = 4e-5
noise_power_dbm = -100.0

[[users]]
distance_m = 10.0
fading_power = 0.7
harvest_efficiency = 0.5
dl_gain = 7e-6
ul_gain = 7e-6
noise_power_dbm = -100.0
"#;
    let s = Scenario::from_toml_str(text).unwrap();
    assert_eq!(s.k(), 2);
    assert!(s.gamma()[0] > s.gamma()[1]);
    let sol = allocate_closed_form(&s, &SolverConfig::default()).unwrap();
    assert!((sol.allocation.total() - 1.0).abs() < 1e-12);
}

#[test]
fn bad_files_are_rejected() {
    assert!(Scenario::from_toml_str("p_max_dbm = 5").is_err());
    assert!(Scenario::from_toml_str("not toml at all [").is_err());
    let bad_xi = r#"
p_max_dbm = 5.0
snr_gap_db = 9.8
[[users]]
distance_m = 5.0
fading_power = 1.0
harvest_efficiency = 1.5
dl_gain = 1.0
ul_gain = 1.0
noise_power_dbm = -100.0
"#;
    assert!(Scenario::from_toml_str(bad_xi).is_err());
    assert!(Scenario::load("/no/such/file.toml").is_err());
}

#[test]
fn fixed_distance_sampling_keeps_distances() {
    let s = sample_scenario_at_distances(&[5.0, 10.0], &SamplingParams::default(), 1).unwrap();
    let d: Vec<f64> = s.users().iter().map(|u: &UserLink| u.distance_m).collect();
    assert_eq!(d, [5.0, 10.0]);
}

#[test]
fn power_scales_every_coefficient() {
    let lo = SamplingParams {
        p_max_dbm: 0.0,
        ..SamplingParams::default()
    };
    let hi = SamplingParams {
        p_max_dbm: 10.0,
        ..SamplingParams::default()
    };
    let a = sample_scenario_at_distances(&[5.0, 10.0], &lo, 9).unwrap();
    let b = sample_scenario_at_distances(&[5.0, 10.0], &hi, 9).unwrap();
    for (x, y) in a.gamma().iter().zip(b.gamma()) {
        assert!((y / x - 10.0).abs() < 1e-9);
    }
}
