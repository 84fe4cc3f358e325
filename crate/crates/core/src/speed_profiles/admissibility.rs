use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profile::SpeedProfile;
use super::seminorm::{periodic_hs_norm, REFINEMENT_TOL};
use crate::error::Result;
use crate::grid::GridSpec;

/// Highest derivative order probed for the `W^{N,∞}` proxy.
pub const MAX_DERIVATIVE_ORDER: usize = 6;
/// Margin added to the strict Sobolev threshold `3/2 + m1`.
pub const SOBOLEV_MARGIN: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityVerdict {
    Both,
    Lipschitz,
    Sobolev,
    Neither,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub order: usize,
    pub value: f64,
    pub refined_value: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SobolevProxy {
    pub s: f64,
    pub v1: f64,
    pub v1_refined: f64,
    pub v2: f64,
    pub v2_refined: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub c1_c2_check: bool,
    pub c_min: f64,
    pub c_max: f64,
    pub derivative_seminorms: Vec<DerivativeEstimate>,
    /// Smallest integer `N` with `N > 3/2 + m1` and `N ≥ 1 + ⌈m1⌉`.
    pub n_required: usize,
    /// Largest `N` for which every order `≤ N` is stable under refinement.
    pub n_supported: usize,
    /// Strict lower threshold `3/2 + m1` for the Sobolev route.
    pub s_threshold: f64,
    pub sobolev_proxy: SobolevProxy,
    pub verdict: RegularityVerdict,
}

pub fn required_derivatives(m1: f64) -> usize {
    let floor = 1 + m1.ceil() as usize;
    let mut n = (1.5 + m1).floor() as usize + 1;
    while (n as f64) <= 1.5 + m1 {
        n += 1;
    }
    n.max(floor)
}

/// Sobolev exponent used for the proxy: `max(1 + ⌈m1⌉, 3/2 + m1 + margin)`.
pub fn required_sobolev(m1: f64) -> f64 {
    (1.0 + m1.ceil()).max(1.5 + m1 + SOBOLEV_MARGIN)
}

fn periodic_derivatives(samples: &[f64], h: f64, max_order: usize) -> Vec<f64> {
    let n = samples.len();
    let mut cur = samples.to_vec();
    let mut out = vec![cur.iter().fold(0.0f64, |m, v| m.max(v.abs()))];
    for _ in 0..max_order {
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let at = |o: isize| cur[((i as isize + o).rem_euclid(n as isize)) as usize];
                (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h)
            })
            .collect();
        out.push(next.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        cur = next;
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale < 1e-8 || (a - b).abs() <= REFINEMENT_TOL * scale
}

/// Checks the bound pair and node bounds exactly, then records regularity proxies.
pub fn check_admissible(c: &SpeedProfile, grid: &GridSpec) -> Result<AdmissibilityReport> {
    c.check_nodes(grid)?;
    let fine = GridSpec::new(grid.n * 2, grid.period)?;
    let coarse_samples = c.sample(grid);
    let fine_samples = c.sample(&fine);
    let c_min = coarse_samples.iter().copied().fold(f64::INFINITY, f64::min);
    let c_max = coarse_samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let dc = periodic_derivatives(&coarse_samples, grid.dx(), MAX_DERIVATIVE_ORDER);
    let df = periodic_derivatives(&fine_samples, fine.dx(), MAX_DERIVATIVE_ORDER);
    let derivative_seminorms: Vec<DerivativeEstimate> = (0..=MAX_DERIVATIVE_ORDER)
        .map(|k| DerivativeEstimate { order: k, value: dc[k], refined_value: df[k], converged: close(dc[k], df[k]) })
        .collect();
    let n_supported = derivative_seminorms.iter().take_while(|d| d.converged).count().saturating_sub(1);

    let m1 = c.m1();
    let n_required = required_derivatives(m1);
    let s = required_sobolev(m1);
    let hs = |samples: &[f64], g: &GridSpec, f: &dyn Fn(f64) -> f64| {
        let v: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
        periodic_hs_norm(&v, g, s)
    };
    let c0 = c.c0;
    let v1 = |x: f64| x - c0;
    let v2 = |x: f64| 1.0 / x - 1.0 / c0;
    let sobolev_proxy = {
        let (a, b) = (hs(&coarse_samples, grid, &v1), hs(&fine_samples, &fine, &v1));
        let (p, q) = (hs(&coarse_samples, grid, &v2), hs(&fine_samples, &fine, &v2));
        SobolevProxy { s, v1: a, v1_refined: b, v2: p, v2_refined: q, converged: close(a, b) && close(p, q) }
    };

    let lip = derivative_seminorms.len() > n_required && n_supported >= n_required;
    let verdict = match (lip, sobolev_proxy.converged) {
        (true, true) => RegularityVerdict::Both,
        (true, false) => RegularityVerdict::Lipschitz,
        (false, true) => RegularityVerdict::Sobolev,
        (false, false) => RegularityVerdict::Neither,
    };
    Ok(AdmissibilityReport {
        c1_c2_check: true,
        c_min,
        c_max,
        derivative_seminorms,
        n_required,
        n_supported,
        s_threshold: 1.5 + m1,
        sobolev_proxy,
        verdict,
    })
}
