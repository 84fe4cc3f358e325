//! Littlewood–Paley windows and spatial bumps.

use super::profile::smooth_step;
use crate::grid::wrapped_offset;

/// `χ0 = 1` on `|ξ| ≤ 1/2`, `0` on `|ξ| ≥ 1`.
pub fn chi0(xi: f64) -> f64 {
    smooth_step((1.0 - xi.abs()) / 0.5)
}

/// `φ(ξ) = χ0(ξ/2) − χ0(ξ)`, supported in `1/2 ≤ |ξ| ≤ 2`.
pub fn phi(xi: f64) -> f64 {
    chi0(0.5 * xi) - chi0(xi)
}

/// `φ_{−1} = χ0` and `φ_j(ξ) = φ(ξ/2^j)`; the sum over `−1..=J` telescopes to `χ0(ξ/2^{J+1})`.
pub fn dyadic_window(j: i32, xi: f64) -> f64 {
    if j < 0 {
        chi0(xi)
    } else {
        phi(xi / 2f64.powi(j))
    }
}

/// Closed support interval of `|ξ|` for `φ_j`.
pub fn dyadic_support(j: i32) -> (f64, f64) {
    if j < 0 {
        (0.0, 1.0)
    } else {
        (2f64.powi(j - 1), 2f64.powi(j + 1))
    }
}

/// Bump in `x` around `center` with radius `radius`, on a circle of length `period`.
pub fn bump_profile(x: f64, center: f64, radius: f64, period: f64) -> f64 {
    let r = wrapped_offset(x, center, period).abs();
    smooth_step((radius - r) / (0.5 * radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supports() {
        assert_eq!(dyadic_window(2, 1.0), 0.0);
        assert_eq!(dyadic_window(2, 16.0), 0.0);
        assert!(dyadic_window(2, 4.0) > 0.0);
        assert_eq!(dyadic_window(-1, 0.0), 1.0);
        for j in 0..8 {
            assert_eq!(dyadic_window(j, 0.0), 0.0);
        }
    }

    #[test]
    fn partition_sum_at_zero() {
        let s: f64 = (-1..=6).map(|j| dyadic_window(j, 0.0)).sum();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn bump_range() {
        for k in 0..1000 {
            let v = bump_profile(k as f64 / 1000.0, 0.3, 0.1, 1.0);
            assert!((0.0..=1.0).contains(&v));
        }
        assert_eq!(bump_profile(0.3, 0.3, 0.1, 1.0), 1.0);
        assert_eq!(bump_profile(0.2, 0.3, 0.1, 1.0), 0.0);
    }
}
