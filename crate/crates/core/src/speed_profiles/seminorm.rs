//! Finite-difference estimates of the `M` and `N` symbol seminorms.
//!
//! `M^m_{j,k}(a) = sup_{α≤j, β≤k} sup_{x,ξ} (1+|ξ|)^{β−m} |∂_x^α ∂_ξ^β a|`
//! `N^m_{s,k}(a) = sup_{β≤k} sup_ξ (1+|ξ|)^{β−m} ‖∂_ξ^β a(·,ξ)‖_{H^s}`
//!
//! The `ξ`-sup is truncated at `ξ_max = n/(2L)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbol::Symbol;
use crate::error::Result;
use crate::grid::{forward_transform, GridFunction, GridSpec};

/// Relative change under refinement beyond which an estimate is flagged.
pub const REFINEMENT_TOL: f64 = 0.05;
/// Largest `k` in the log-spaced samples `±ξ_max 2^{-k}`.
pub const LOG_SAMPLE_DEPTH: i32 = 20;
/// Zero-mode energy share at `ξ_max` above which an `N` estimate is flagged divergent.
pub const MEAN_FRACTION_LIMIT: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeminormKind {
    M,
    N,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridMeta {
    pub n: usize,
    pub period: f64,
    pub fd_order: usize,
    pub xi_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub kind: SeminormKind,
    /// `(j, k, m)` for `M`, `(s, k, m)` for `N`.
    pub indices: (f64, usize, f64),
    pub value: f64,
    pub grid_meta: GridMeta,
    /// Same estimate on the grid with `2n` nodes.
    pub refined_value: Option<f64>,
    pub converged: bool,
    /// Set for `N` estimates when `a(·, ξ_max)` is dominated by its mean.
    pub divergent: bool,
}

/// Sample locations for a seminorm sup.
#[derive(Debug, Clone)]
pub struct SeminormBox {
    pub grid: GridSpec,
    pub xi: Vec<f64>,
}

impl SeminormBox {
    pub fn from_grid(grid: &GridSpec) -> Self {
        let xm = grid.xi_max();
        let step = 0.5 * grid.dxi();
        let count = (xm / step).round() as i64;
        let mut xi: Vec<f64> = (-count..=count).map(|i| i as f64 * step).collect();
        for k in 0..=LOG_SAMPLE_DEPTH {
            let v = xm * 2f64.powi(-k);
            xi.push(v);
            xi.push(-v);
        }
        xi.sort_by(f64::total_cmp);
        xi.dedup();
        Self { grid: *grid, xi }
    }
}

#[inline]
fn stencil(f: &dyn Fn(f64) -> Complex64, z: f64, h: f64) -> Complex64 {
    (f(z - 2.0 * h) - 8.0 * f(z - h) + 8.0 * f(z + h) - f(z + 2.0 * h)) / (12.0 * h)
}

/// `k`-fold nested fourth-order central difference.
pub fn nested_derivative(f: &dyn Fn(f64) -> Complex64, z: f64, h: f64, k: usize) -> Complex64 {
    if k == 0 {
        return f(z);
    }
    let inner = |w: f64| nested_derivative(f, w, h, k - 1);
    stencil(&inner, z, h)
}

fn xi_step(b: &SeminormBox, xi: f64, beta: usize) -> f64 {
    (0.25 * b.grid.dxi()).min(xi.abs() / (4.0 * beta.max(1) as f64))
}

/// `∂_x^α ∂_ξ^β a(x, ξ)` by nested stencils.
pub fn mixed_derivative(a: &Symbol, x: f64, xi: f64, alpha: usize, beta: usize, hx: f64, hxi: f64) -> Complex64 {
    let in_xi = |xx: f64| {
        let g = |w: f64| a.eval(xx, w);
        nested_derivative(&g, xi, hxi, beta)
    };
    nested_derivative(&in_xi, x, hx, alpha)
}

/// `M^m_{j,k}` on one sample box.
pub fn seminorm_m_on(a: &Symbol, j: usize, k: usize, m: f64, b: &SeminormBox) -> f64 {
    let hx = b.grid.dx();
    let mut best = 0.0f64;
    for &xi in &b.xi {
        for beta in 0..=k {
            if beta > 0 && xi == 0.0 {
                continue;
            }
            let hxi = xi_step(b, xi, beta);
            let w = (1.0 + xi.abs()).powf(beta as f64 - m);
            for alpha in 0..=j {
                for i in 0..b.grid.n {
                    let v = mixed_derivative(a, b.grid.x(i), xi, alpha, beta, hx, hxi).norm() * w;
                    best = best.max(v);
                }
            }
        }
    }
    best
}

fn refined(grid: &GridSpec) -> Result<GridSpec> {
    GridSpec::new(grid.n * 2, grid.period)
}

fn meta(grid: &GridSpec) -> GridMeta {
    GridMeta { n: grid.n, period: grid.period, fd_order: 4, xi_max: grid.xi_max() }
}

fn agrees(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale < 1e-12 || (a - b).abs() <= REFINEMENT_TOL * scale
}

/// `M^m_{j,k}(a)` on `grid`, cross-checked on the `2n` grid.
pub fn seminorm_m(a: &Symbol, j: usize, k: usize, m: f64, grid: &GridSpec) -> Result<SeminormEstimate> {
    let value = seminorm_m_on(a, j, k, m, &SeminormBox::from_grid(grid));
    let fine = seminorm_m_on(a, j, k, m, &SeminormBox::from_grid(&refined(grid)?));
    Ok(SeminormEstimate {
        kind: SeminormKind::M,
        indices: (j as f64, k, m),
        value,
        grid_meta: meta(grid),
        refined_value: Some(fine),
        converged: agrees(value, fine),
        divergent: false,
    })
}

/// Periodic discrete `H^s` norm with weight `|1 + 2πiλ|^s`.
pub fn periodic_hs_norm(values: &[Complex64], grid: &GridSpec, s: f64) -> f64 {
    let f = GridFunction { grid: *grid, values: values.to_vec() };
    let fh = forward_transform(&f);
    let lam = grid.freq_nodes();
    let sum: f64 = fh
        .coeffs
        .iter()
        .zip(&lam)
        .map(|(c, l)| (1.0 + 4.0 * std::f64::consts::PI.powi(2) * l * l).powf(s) * c.norm_sqr())
        .sum();
    (grid.dxi() * sum).sqrt()
}

fn mean_fraction(values: &[Complex64], grid: &GridSpec) -> f64 {
    let f = GridFunction { grid: *grid, values: values.to_vec() };
    let fh = forward_transform(&f);
    let total: f64 = fh.coeffs.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        0.0
    } else {
        fh.coeff(0).norm_sqr() / total
    }
}

/// `N^m_{s,k}` on one sample box; also returns the mean fraction at `ξ_max`.
pub fn seminorm_n_on(a: &Symbol, s: f64, k: usize, m: f64, b: &SeminormBox) -> (f64, f64) {
    let g = &b.grid;
    let mut best = 0.0f64;
    for &xi in &b.xi {
        for beta in 0..=k {
            if beta > 0 && xi == 0.0 {
                continue;
            }
            let hxi = xi_step(b, xi, beta);
            let w = (1.0 + xi.abs()).powf(beta as f64 - m);
            let col: Vec<Complex64> = (0..g.n)
                .map(|i| {
                    let x = g.x(i);
                    let f = |u: f64| a.eval(x, u);
                    nested_derivative(&f, xi, hxi, beta)
                })
                .collect();
            best = best.max(w * periodic_hs_norm(&col, g, s));
        }
    }
    let xm = g.xi_max();
    let top: Vec<Complex64> = (0..g.n).map(|i| a.eval(g.x(i), xm)).collect();
    (best, mean_fraction(&top, g))
}

/// `N^m_{s,k}(a)` on `grid`, cross-checked on the `2n` grid.
pub fn seminorm_n(a: &Symbol, s: f64, k: usize, m: f64, grid: &GridSpec) -> Result<SeminormEstimate> {
    let (value, frac) = seminorm_n_on(a, s, k, m, &SeminormBox::from_grid(grid));
    let (fine, frac_fine) = seminorm_n_on(a, s, k, m, &SeminormBox::from_grid(&refined(grid)?));
    Ok(SeminormEstimate {
        kind: SeminormKind::N,
        indices: (s, k, m),
        value,
        grid_meta: meta(grid),
        refined_value: Some(fine),
        converged: agrees(value, fine),
        divergent: frac.max(frac_fine) > MEAN_FRACTION_LIMIT,
    })
}
