//! Reference computations for the integration tests.
//!
//! Plain bisection throughout, written against the rate formula directly so a
//! bug in the library's Newton, fixed-point or early-exit logic cannot hide
//! behind the same code path.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wpcn::{SamplingParams, Scenario};

/// Root of an increasing `f` inside `[lo, hi]`, to the last representable bit.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) <= 0.0 && f(hi) >= 0.0, "root not bracketed in [{lo}, {hi}]");
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `tau log2(1 + gamma tau0 / tau)`, written out independently of the library.
pub fn rate(gamma: f64, tau0: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        0.0
    } else {
        tau * (1.0 + gamma * tau0 / tau).log2()
    }
}

/// Root `z > 1` of `z ln z - z + 1 = a`.
pub fn z_root(a: f64) -> f64 {
    let h = |z: f64| z * z.ln() - z + 1.0 - a;
    let mut hi = 2.0;
    while h(hi) < 0.0 {
        hi *= 2.0;
    }
    bisect(h, 1.0, hi)
}

/// Slot length giving rate `r` to a user with coefficient `gamma`.
pub fn slot_for_rate(gamma: f64, tau0: f64, r: f64) -> f64 {
    let mut hi = 1.0;
    while rate(gamma, tau0, hi) < r {
        hi *= 2.0;
    }
    bisect(|t| rate(gamma, tau0, t) - r, 0.0, hi)
}

/// Best common rate at a fixed `tau0`, by bisection on the rate.
pub fn common_rate(gamma: &[f64], tau0: f64) -> f64 {
    let budget = 1.0 - tau0;
    let cap = gamma
        .iter()
        .map(|&g| rate(g, tau0, budget))
        .fold(f64::INFINITY, f64::min);
    let excess = |r: f64| gamma.iter().map(|&g| slot_for_rate(g, tau0, r)).sum::<f64>() - budget;
    if excess(cap) <= 0.0 {
        // a single user: the cap itself is the answer
        return cap;
    }
    bisect(excess, 0.0, cap)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform draw in `[lo, hi]`.
pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Synthetic scenario with coefficients log-uniform in `[lo, hi]`.
pub fn gamma_scenario(rng: &mut impl Rng, k: usize, lo: f64, hi: f64) -> Scenario {
    let gamma: Vec<f64> = (0..k).map(|_| log_uniform(rng, lo, hi)).collect();
    Scenario::from_gamma(&gamma).unwrap()
}

/// Physical scenario with a random power level in `[-10, 30]` dBm, so rates
/// range from far below to well above one bit/s/Hz.
pub fn physical_scenario(rng: &mut impl Rng, k: usize) -> Scenario {
    let params = SamplingParams {
        p_max_dbm: rng.gen_range(-10.0..=30.0),
        ..SamplingParams::default()
    };
    wpcn::sample_scenario(k, &params, rng.gen()).unwrap()
}
