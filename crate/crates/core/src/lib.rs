//! Time allocation for harvest-then-transmit wireless powered networks.
//!
//! An access point charges `K` users by wireless power transfer for a fraction
//! `tau0` of each frame; the users then take turns sending data with the
//! harvested energy. This crate chooses the time split:
//!
//! * [`sum_throughput`] maximizes the total rate, in semi-closed form and by an
//!   independent golden-section route.
//! * [`maxmin`] maximizes the worst user's rate with a nested
//!   golden-section / bisection / fixed-point algorithm.
//! * [`oracle`] holds brute-force grids and a projected-subgradient baseline.
//! * [`bench`] runs the Monte Carlo experiments and writes CSV.
//!
//! ```
//! use wpcn::{allocate_closed_form, solve_maxmin, Scenario, SolverConfig};
//!
//! let scenario = Scenario::from_gamma(&[1.0]).unwrap();
//! let cfg = SolverConfig::default();
//! let sum = allocate_closed_form(&scenario, &cfg).unwrap();
//! let fair = solve_maxmin(&scenario, &cfg).unwrap();
//! assert!((sum.allocation.tau0 - 0.632_121).abs() < 1e-6);
//! assert!((fair.allocation.tau0 - sum.allocation.tau0).abs() < 1e-5);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod channel;
pub mod config;
pub mod error;
pub mod maxmin;
pub mod oracle;
pub mod search;
pub mod sum_throughput;

pub use channel::{
    harvested_energy, linear_from_db, per_user_snr_coefficient, sample_scenario, user_rate, watts_from_dbm,
    SamplingParams, Scenario, TimeAllocation, UserLink,
};
pub use config::SolverConfig;
pub use error::{Error, Result};
pub use maxmin::{
    bisect_common_rate, fixed_point_tau, g_concavity_probe, rate_feasibility, solve_maxmin, MaxMinSolution,
};
pub use oracle::{grid_maxmin_oracle, grid_sum_oracle, subgradient_maxmin_baseline, BaselineReport, GridSpec};
pub use sum_throughput::{allocate_closed_form, allocate_golden_section, solve_z, sum_rate, SumSolution};
