//! Tolerances and iteration limits shared by every solver in the crate.

use crate::error::{invalid, Result};

/// Numerical settings for the sum-throughput, max-min and baseline solvers.
///
/// `rate_tol` is the throughput accuracy (bps/Hz) reported by the max-min
/// solver and used as the matched accuracy of the subgradient baseline. The
/// remaining fields control how tightly the nested searches are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Throughput accuracy in bps/Hz.
    pub rate_tol: f64,
    /// Final bracket width of the outer golden-section search over `tau0` (max-min).
    pub tau_tol: f64,
    /// Final bracket width of the golden-section search over `tau0` (sum throughput).
    pub sum_tau_tol: f64,
    /// Residual tolerance of the `z ln z - z + 1 = A` root.
    pub z_tol: f64,
    /// Absolute accuracy of each per-user slot length from the fixed-point solve.
    pub fp_tol: f64,
    /// Fixed-point iterations before falling back to bracketed bisection.
    pub fp_max_iter: usize,
    /// Relative band on `|sum(tau_i) - (1 - tau0)| / (1 - tau0)` that ends the
    /// common-rate bisection.
    pub time_tol: f64,
    /// Iteration cap of the common-rate bisection.
    pub bisect_max_iter: usize,
    /// Slack allowed on the total time constraint of a returned allocation.
    pub feas_eps: f64,
    /// Subgradient step numerator `a` in `a / (b + n)`.
    pub subgrad_step_a: f64,
    /// Subgradient step offset `b` in `a / (b + n)`.
    pub subgrad_step_b: f64,
    /// Iterations without `rate_tol` improvement before the baseline stops.
    pub subgrad_patience: usize,
    /// Hard iteration cap of the subgradient baseline.
    pub subgrad_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rate_tol: 1e-3,
            tau_tol: 1e-5,
            sum_tau_tol: 1e-6,
            z_tol: 1e-10,
            fp_tol: 1e-12,
            fp_max_iter: 200,
            time_tol: 1e-11,
            bisect_max_iter: 200,
            feas_eps: 1e-6,
            subgrad_step_a: 1.0,
            subgrad_step_b: 10.0,
            subgrad_patience: 200,
            subgrad_max_iter: 200_000,
        }
    }
}

impl SolverConfig {
    /// Default settings with a different throughput accuracy.
    pub fn with_rate_tol(rate_tol: f64) -> Self {
        Self {
            rate_tol,
            ..Self::default()
        }
    }

    /// Settings for a common relative accuracy `eps` on the max-min rate.
    ///
    /// The common-rate band and the power-transfer search width are set to
    /// `eps`, and the per-user slot solves are kept three orders tighter so
    /// their error does not dominate the band.
    pub fn matched_accuracy(eps: f64) -> Self {
        Self {
            rate_tol: eps,
            tau_tol: eps,
            time_tol: eps,
            fp_tol: eps * 1e-3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rate_tol", self.rate_tol),
            ("tau_tol", self.tau_tol),
            ("sum_tau_tol", self.sum_tau_tol),
            ("z_tol", self.z_tol),
            ("fp_tol", self.fp_tol),
            ("time_tol", self.time_tol),
            ("feas_eps", self.feas_eps),
            ("subgrad_step_a", self.subgrad_step_a),
            ("subgrad_step_b", self.subgrad_step_b),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {value}")));
            }
        }
        let counts = [
            ("fp_max_iter", self.fp_max_iter),
            ("bisect_max_iter", self.bisect_max_iter),
            ("subgrad_patience", self.subgrad_patience),
            ("subgrad_max_iter", self.subgrad_max_iter),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(invalid(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}
