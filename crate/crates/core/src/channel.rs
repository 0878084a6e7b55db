//! Harvest-then-transmit link model.
//!
//! All arithmetic is in linear units (watts, unitless power gains). Decibel
//! quantities are only accepted at the edges: [`watts_from_dbm`],
//! [`linear_from_db`], [`SamplingParams`] and the scenario file format.
//!
//! A frame has unit length. The access point broadcasts power for a fraction
//! `tau0`, then user `i` transmits for `tau[i]` using everything it harvested,
//! which gives the rate `tau[i] * log2(1 + gamma[i] * tau0 / tau[i])`.

use std::f64::consts::LN_2;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Path-loss constant of the simulation model: `h = g = 1e-3 * rho^2 * d^-2`.
pub const PATH_LOSS_AT_1M: f64 = 1e-3;

pub fn watts_from_dbm(level: f64) -> f64 {
    10f64.powf((level - 30.0) / 10.0)
}

pub fn dbm_from_watts(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn linear_from_db(level: f64) -> f64 {
    10f64.powf(level / 10.0)
}

pub fn db_from_linear(value: f64) -> f64 {
    10.0 * value.log10()
}

/// Channel and hardware parameters of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserLink {
    pub distance_m: f64,
    /// Small-scale fading power `rho^2`.
    pub fading_power: f64,
    /// RF-to-DC conversion efficiency in `(0, 1)`.
    pub harvest_efficiency: f64,
    /// Downlink power gain `h`.
    pub dl_gain: f64,
    /// Uplink power gain `g`.
    pub ul_gain: f64,
    pub noise_power_w: f64,
}

impl UserLink {
    /// Link with reciprocal gains `1e-3 * fading_power / distance^2`.
    pub fn from_path_loss(distance_m: f64, fading_power: f64, harvest_efficiency: f64, noise_power_w: f64) -> Self {
        let gain = PATH_LOSS_AT_1M * fading_power / (distance_m * distance_m);
        Self {
            distance_m,
            fading_power,
            harvest_efficiency,
            dl_gain: gain,
            ul_gain: gain,
            noise_power_w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.distance_m,
            self.fading_power,
            self.harvest_efficiency,
            self.dl_gain,
            self.ul_gain,
            self.noise_power_w,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("user link parameters must be finite"));
        }
        if self.distance_m <= 0.0 {
            return Err(invalid(format!("distance must be positive, got {}", self.distance_m)));
        }
        if !(self.harvest_efficiency > 0.0 && self.harvest_efficiency <= 1.0) {
            return Err(invalid(format!(
                "harvest efficiency must lie in (0, 1], got {}",
                self.harvest_efficiency
            )));
        }
        if self.fading_power < 0.0 || self.dl_gain < 0.0 || self.ul_gain < 0.0 {
            return Err(invalid("fading power and channel gains must be non-negative"));
        }
        if self.noise_power_w <= 0.0 {
            return Err(invalid(format!(
                "noise power must be positive, got {}",
                self.noise_power_w
            )));
        }
        Ok(())
    }
}

/// Effective SNR coefficient `xi * h * g * p_max / (snr_gap * sigma^2)`.
pub fn per_user_snr_coefficient(link: &UserLink, p_max_w: f64, snr_gap: f64) -> Result<f64> {
    if !(link.noise_power_w > 0.0) {
        return Err(invalid(format!(
            "noise power must be positive, got {}",
            link.noise_power_w
        )));
    }
    if !(snr_gap > 0.0) {
        return Err(invalid(format!("snr gap must be positive, got {snr_gap}")));
    }
    if !(p_max_w >= 0.0) {
        return Err(invalid(format!("power budget must be non-negative, got {p_max_w}")));
    }
    let gamma = link.harvest_efficiency * link.dl_gain * link.ul_gain * p_max_w / (snr_gap * link.noise_power_w);
    if !gamma.is_finite() {
        return Err(invalid("snr coefficient overflowed"));
    }
    Ok(gamma.max(0.0))
}

/// Energy collected during the power-transfer phase of a unit frame.
pub fn harvested_energy(link: &UserLink, p_max_w: f64, tau0: f64) -> f64 {
    tau0 * link.harvest_efficiency * link.dl_gain * p_max_w
}

/// Achievable uplink rate in bps/Hz, extended by continuity to 0 at `tau_i = 0`.
pub fn user_rate(gamma_i: f64, tau0: f64, tau_i: f64) -> f64 {
    let energy = gamma_i * tau0;
    if tau_i <= 0.0 || energy <= 0.0 {
        return 0.0;
    }
    tau_i * (energy / tau_i).ln_1p() / LN_2
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    p_max_w: f64,
    snr_gap: f64,
    users: Vec<UserLink>,
    gamma: Vec<f64>,
}

impl Scenario {
    pub fn new(p_max_w: f64, snr_gap: f64, users: Vec<UserLink>) -> Result<Self> {
        if users.is_empty() {
            return Err(invalid("a scenario needs at least one user"));
        }
        if !(p_max_w > 0.0 && p_max_w.is_finite()) {
            return Err(invalid(format!("power budget must be positive, got {p_max_w}")));
        }
        for link in &users {
            link.validate()?;
        }
        let gamma = users
            .iter()
            .map(|link| per_user_snr_coefficient(link, p_max_w, snr_gap))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p_max_w,
            snr_gap,
            users,
            gamma,
        })
    }

    /// Scenario with prescribed SNR coefficients.
    ///
    /// The links are synthetic (unit power, unit gap, unit noise, `xi = 0.5`,
    /// `h = g = sqrt(2 gamma)`); the stored coefficients are exactly `gammas`.
    pub fn from_gamma(gammas: &[f64]) -> Result<Self> {
        if gammas.is_empty() {
            return Err(invalid("a scenario needs at least one user"));
        }
        if let Some(bad) = gammas.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(invalid(format!("snr coefficients must be finite and >= 0, got {bad}")));
        }
        let users = gammas
            .iter()
            .map(|&g| {
                let gain = (2.0 * g).sqrt();
                UserLink {
                    distance_m: 1.0,
                    fading_power: 1.0,
                    harvest_efficiency: 0.5,
                    dl_gain: gain,
                    ul_gain: gain,
                    noise_power_w: 1.0,
                }
            })
            .collect();
        Ok(Self {
            p_max_w: 1.0,
            snr_gap: 1.0,
            users,
            gamma: gammas.to_vec(),
        })
    }

    pub fn p_max_w(&self) -> f64 {
        self.p_max_w
    }

    pub fn snr_gap(&self) -> f64 {
        self.snr_gap
    }

    pub fn users(&self) -> &[UserLink] {
        &self.users
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Number of users `K`.
    pub fn k(&self) -> usize {
        self.users.len()
    }

    /// `A = sum(gamma)`.
    pub fn total_gamma(&self) -> f64 {
        self.gamma.iter().sum()
    }

    pub fn to_toml_string(&self) -> Result<String> {
        let file = ScenarioFile {
            p_max_dbm: dbm_from_watts(self.p_max_w),
            snr_gap_db: db_from_linear(self.snr_gap),
            users: self
                .users
                .iter()
                .map(|u| UserRecord {
                    distance_m: u.distance_m,
                    fading_power: u.fading_power,
                    harvest_efficiency: u.harvest_efficiency,
                    dl_gain: u.dl_gain,
                    ul_gain: u.ul_gain,
                    noise_power_dbm: dbm_from_watts(u.noise_power_w),
                })
                .collect(),
        };
        toml::to_string(&file).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let users = file
            .users
            .into_iter()
            .map(|u| UserLink {
                distance_m: u.distance_m,
                fading_power: u.fading_power,
                harvest_efficiency: u.harvest_efficiency,
                dl_gain: u.dl_gain,
                ul_gain: u.ul_gain,
                noise_power_w: watts_from_dbm(u.noise_power_dbm),
            })
            .collect();
        Self::new(watts_from_dbm(file.p_max_dbm), linear_from_db(file.snr_gap_db), users)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }
}

/// On-disk scenario layout. Powers are in dBm, the SNR gap in dB, distances in meters.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    p_max_dbm: f64,
    snr_gap_db: f64,
    users: Vec<UserRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UserRecord {
    distance_m: f64,
    fading_power: f64,
    harvest_efficiency: f64,
    dl_gain: f64,
    ul_gain: f64,
    noise_power_dbm: f64,
}

/// Time split of one frame: power transfer for `tau0`, then user `i` for `tau[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeAllocation {
    pub tau0: f64,
    pub tau: Vec<f64>,
}

impl TimeAllocation {
    pub fn new(tau0: f64, tau: Vec<f64>) -> Self {
        Self { tau0, tau }
    }

    pub fn total(&self) -> f64 {
        self.tau0 + self.tau.iter().sum::<f64>()
    }

    pub fn is_feasible(&self, feas_eps: f64) -> bool {
        let in_unit = |t: f64| (0.0..=1.0).contains(&t);
        in_unit(self.tau0) && self.tau.iter().all(|&t| in_unit(t)) && self.total() <= 1.0 + feas_eps
    }

    /// Largest coordinate-wise difference, `tau0` included.
    pub fn max_abs_diff(&self, other: &TimeAllocation) -> f64 {
        assert_eq!(self.tau.len(), other.tau.len(), "allocation sizes differ");
        self.tau
            .iter()
            .zip(&other.tau)
            .map(|(a, b)| (a - b).abs())
            .fold((self.tau0 - other.tau0).abs(), f64::max)
    }

    /// Per-user rates of this allocation in `scenario`.
    pub fn rates(&self, scenario: &Scenario) -> Vec<f64> {
        scenario
            .gamma()
            .iter()
            .zip(&self.tau)
            .map(|(&g, &t)| user_rate(g, self.tau0, t))
            .collect()
    }
}

/// Monte Carlo scenario model: uniform distances, Rayleigh fading, path loss `1e-3 d^-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingParams {
    pub distance_range: (f64, f64),
    pub p_max_dbm: f64,
    pub snr_gap_db: f64,
    pub noise_dbm: f64,
    pub harvest_efficiency: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            distance_range: (5.0, 20.0),
            p_max_dbm: 5.0,
            snr_gap_db: 9.8,
            noise_dbm: -100.0,
            harvest_efficiency: 0.5,
        }
    }
}

/// Portable seeded generator used for every random draw in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-mean exponential draw: the power of a standard Rayleigh amplitude.
pub fn sample_fading_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1]
    -(1.0 - rng.gen::<f64>()).ln()
}

/// Draws `k` users with uniform distances and Rayleigh fading.
///
/// Each user consumes two uniforms from a ChaCha8 stream seeded with `seed`:
/// the distance first, then the fading power.
pub fn sample_scenario(k: usize, params: &SamplingParams, seed: u64) -> Result<Scenario> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let (lo, hi) = params.distance_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(invalid(format!("distance range [{lo}, {hi}] is not a valid interval")));
    }
    let mut rng = rng_from_seed(seed);
    let noise_w = watts_from_dbm(params.noise_dbm);
    let users = (0..k)
        .map(|_| {
            let distance = lo + (hi - lo) * rng.gen::<f64>();
            let fading = sample_fading_power(&mut rng);
            UserLink::from_path_loss(distance, fading, params.harvest_efficiency, noise_w)
        })
        .collect();
    Scenario::new(
        watts_from_dbm(params.p_max_dbm),
        linear_from_db(params.snr_gap_db),
        users,
    )
}

/// Draws fading only, for users at the given fixed distances.
pub fn sample_scenario_at_distances(distances_m: &[f64], params: &SamplingParams, seed: u64) -> Result<Scenario> {
    if distances_m.is_empty() {
        return Err(invalid("at least one distance is required"));
    }
    let mut rng = rng_from_seed(seed);
    let noise_w = watts_from_dbm(params.noise_dbm);
    let users = distances_m
        .iter()
        .map(|&d| {
            let fading = sample_fading_power(&mut rng);
            UserLink::from_path_loss(d, fading, params.harvest_efficiency, noise_w)
        })
        .collect();
    Scenario::new(
        watts_from_dbm(params.p_max_dbm),
        linear_from_db(params.snr_gap_db),
        users,
    )
}
