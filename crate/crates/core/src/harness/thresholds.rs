//! Verdict thresholds. Every field can be overridden from a config's `tolerances` object.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Relative `L²` error of the stepper against the exact propagator at `T`.
    pub oracle_rel_error: f64,
    pub oracle_runtime_s: f64,
    /// Conservation window `[lo, hi]` for `E(t)` checks.
    pub conservation_window: (f64, f64),
    pub conservation_exact: f64,
    pub conservation_stepper: f64,

    /// Relative change of the maximal growth rate under refinement.
    pub rate_stability: f64,
    /// Bound on `|rate|` when the speed is constant.
    pub constant_rate_abs: f64,
    pub theorem1_runtime_s: f64,

    pub slope_lo: f64,
    pub slope_hi: f64,
    pub r2_min: f64,

    /// Slack subtracted from `N − 3/2 − m1` for the dyadic decay rate.
    pub decay_margin: f64,
    /// Relative operator-norm error of the summed dyadic pieces.
    pub reconstruction_tol: f64,

    pub coercivity_norm_max: f64,
    /// The norm bound applies for `t ≤ coercivity_t_max`.
    pub coercivity_t_max: f64,
    pub sigma_spread_max: f64,

    /// Relative distance of the local exponent from `−1/c_loc`.
    pub exponent_rel_tol: f64,
    /// Allowed relative spread of each constant around its median.
    pub constant_stability: f64,

    pub gamma_tol: f64,
    pub gamma_derivative_tol: f64,
    pub vanishing_tol: f64,
    pub partition_tol: f64,
    pub product_tol: f64,
    pub identity_tol: f64,

    pub seminorm_tol: f64,
    pub boundedness_growth: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            oracle_rel_error: 1e-6,
            oracle_runtime_s: 60.0,
            conservation_window: (0.1, 1.0),
            conservation_exact: 1e-10,
            conservation_stepper: 1e-4,
            rate_stability: 0.2,
            constant_rate_abs: 1e-4,
            theorem1_runtime_s: 600.0,
            slope_lo: 0.8,
            slope_hi: 1.2,
            r2_min: 0.98,
            decay_margin: 0.5,
            reconstruction_tol: 1e-6,
            coercivity_norm_max: 0.5,
            coercivity_t_max: 2f64.powi(-5),
            sigma_spread_max: 2.0,
            exponent_rel_tol: 0.1,
            constant_stability: 0.2,
            gamma_tol: 1e-10,
            gamma_derivative_tol: 1e-6,
            vanishing_tol: 1e-10,
            partition_tol: 1e-10,
            product_tol: 1e-12,
            identity_tol: 1e-10,
            seminorm_tol: 0.02,
            boundedness_growth: 2.0,
        }
    }
}

impl Thresholds {
    pub fn slope_ok(&self, slope: f64, r2: f64) -> bool {
        slope >= self.slope_lo && slope <= self.slope_hi && r2 >= self.r2_min
    }
}
