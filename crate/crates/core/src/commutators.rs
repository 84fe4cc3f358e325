//! Semicommutators `𝔠_t(p1, p2) = p1(x,tD) p2(x,tD) − (p1 p2)(x,tD)`, their dyadic
//! localizations, and the `Γ` transform.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{fft_in_place, ifft_in_place, swap_halves, GridFunction, GridSpec};
use crate::quantize::{quantize_semiclassical, CMatrix, QuantizationMode, QuantizedOperator};
use crate::speed_profiles::{dyadic_support, make_dyadic_window, make_weight, Symbol};

/// Frequency window `φ(ξ)` used to localize `𝔠_t` near the diagonal.
#[derive(Debug, Clone)]
pub struct Window {
    pub symbol: Symbol,
    /// `|ξ|`-support `[lo, hi]` of the window.
    pub support: (f64, f64),
    pub index: Option<i32>,
}

impl Window {
    pub fn dyadic(j: i32) -> Self {
        Self { symbol: make_dyadic_window(j), support: dyadic_support(j), index: Some(j) }
    }

    /// Length of `Conv(supp φ ∪ {0})`, taken on both sides of the origin.
    pub fn hull_length(&self) -> f64 {
        2.0 * self.support.1
    }

    /// Distance from the support to the origin.
    pub fn distance_to_origin(&self) -> f64 {
        self.support.0
    }

    /// Whether some grid difference `t(ξ − η)` can reach the window.
    pub fn is_active(&self, t: f64, grid: &GridSpec) -> bool {
        self.support.0 < t * grid.xi_max()
    }
}

#[derive(Debug, Clone)]
pub struct CommutatorSpec {
    pub p1: Symbol,
    pub p2: Symbol,
    pub t: f64,
    pub localization: Option<Window>,
}

impl CommutatorSpec {
    pub fn new(p1: Symbol, p2: Symbol, t: f64) -> Self {
        Self { p1, p2, t, localization: None }
    }

    pub fn localized(mut self, w: Window) -> Self {
        self.localization = Some(w);
        self
    }

    /// `μ = max{m1, m2, 0}` from the declared orders.
    pub fn mu(&self) -> f64 {
        self.p1.order.max(self.p2.order).max(0.0)
    }

    pub fn orders(&self) -> (f64, f64) {
        (self.p1.order, self.p2.order)
    }
}

/// `p1(x,tD) p2(x,tD) − (p1 p2)(x,tD)`.
pub fn semicommutator(spec: &CommutatorSpec, grid: &GridSpec) -> QuantizedOperator {
    let a = quantize_semiclassical(&spec.p1, spec.t, grid);
    let b = quantize_semiclassical(&spec.p2, spec.t, grid);
    let ab = quantize_semiclassical(&spec.p1.product(&spec.p2), spec.t, grid);
    QuantizedOperator {
        grid: *grid,
        matrix: &a.matrix * &b.matrix - ab.matrix,
        mode: QuantizationMode::Semiclassical { t: spec.t },
        symbol_label: format!("c_t({},{})", spec.p1.label, spec.p2.label),
    }
}

/// `[a(x,tD), χ]` for a multiplication operator `χ(x)`.
pub fn commutator_with_multiplier(a: &Symbol, t: f64, chi: &[f64], grid: &GridSpec) -> QuantizedOperator {
    let op = quantize_semiclassical(a, t, grid);
    let n = grid.n;
    let m = CMatrix::from_fn(n, n, |k, l| op.matrix[(k, l)] * (chi[l] - chi[k]));
    QuantizedOperator {
        grid: *grid,
        matrix: m,
        mode: QuantizationMode::Semiclassical { t },
        symbol_label: format!("[{},chi]", a.label),
    }
}

fn roots(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n).map(|r| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * r as f64 / n as f64)).collect()
}

/// Integer difference `i − j` wrapped into `[−n/2, n/2)`.
fn wrap_index(d: i64, n: usize) -> i64 {
    let n = n as i64;
    (d + n / 2).rem_euclid(n) - n / 2
}

/// Kernel `K(x_k, η_j)` of the localized commutator; rows are `x_k`, columns `η_j` in physical order.
pub fn localized_kernel(spec: &CommutatorSpec, window: &Window, grid: &GridSpec) -> CMatrix {
    let n = grid.n;
    let t = spec.t;
    let xi = grid.freq_nodes();
    let (dx, dxi) = (grid.dx(), grid.dxi());
    let up = roots(n, 1.0);

    // E[k,i] = e^{2πi x_k ξ_i}
    let e = CMatrix::from_fn(n, n, |k, i| up[(k * grid.fft_slot(grid.freq_index(i))) % n]);
    let p1 = CMatrix::from_fn(n, n, |k, i| spec.p1.eval(grid.x(k), t * xi[i]));

    // p̂2(λ; tη_j) in FFT slot order, one column per η_j.
    let mut p2hat = CMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        let mut col: Vec<Complex64> = (0..n).map(|l| spec.p2.eval(grid.x(l), t * xi[j]) * dx).collect();
        fft_in_place(&mut col);
        p2hat.set_column(j, &nalgebra::DVector::from_vec(col));
    }

    let phi_by_diff: Vec<f64> = (0..n)
        .map(|d| {
            let w = wrap_index(d as i64, n);
            window.symbol.eval(0.0, t * w as f64 * dxi).re
        })
        .collect();
    let g = CMatrix::from_fn(n, n, |i, j| {
        let d = (i + n - j) % n;
        p2hat[(d, j)] * phi_by_diff[d]
    });

    let ep1 = e.component_mul(&p1);
    let first = &ep1 * &g;
    let second = (&e * &g).component_mul(&p1);
    (first - second) * Complex64::new(dxi, 0.0)
}

/// `𝔠_{t,φ}(p1, p2)` as an operator on grid functions.
pub fn localized_commutator(spec: &CommutatorSpec, grid: &GridSpec) -> Result<QuantizedOperator> {
    let window = spec
        .localization
        .as_ref()
        .ok_or_else(|| LabError::Config("localized commutator needs a window".into()))?;
    let n = grid.n;
    let k = localized_kernel(spec, window, grid);
    // A = Δξ K (Δx E^*): each row becomes a forward DFT over η.
    let scale = Complex64::new(grid.dxi() * grid.dx(), 0.0);
    let mut a = CMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for r in 0..n {
        for j in 0..n {
            row[j] = k[(r, j)];
        }
        swap_halves(&mut row);
        fft_in_place(&mut row);
        for l in 0..n {
            a[(r, l)] = row[l] * scale;
        }
    }
    Ok(QuantizedOperator {
        grid: *grid,
        matrix: a,
        mode: QuantizationMode::Semiclassical { t: spec.t },
        symbol_label: format!(
            "c_t,phi{}({},{})",
            window.index.map(|j| j.to_string()).unwrap_or_default(),
            spec.p1.label,
            spec.p2.label
        ),
    })
}

/// `a(x, ξ) ⟨ξ⟩^m` with `⟨ξ⟩ = 1 + 2πiξ`.
pub fn dagger_weight(sym: &Symbol, m: f64) -> Symbol {
    if m == 0.0 {
        return sym.clone();
    }
    let label = sym.label.clone();
    sym.product(&make_weight(m)).with_label(label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaSign {
    Plus,
    Minus,
}

/// Default window `γ(w) = 1/(1 + 2πiw)`.
pub fn default_gamma(w: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) / Complex64::new(1.0, 2.0 * std::f64::consts::PI * w)
}

/// Samples of `γ` at the wrapped grid offsets `wΔx`, `w ∈ [−n/2, n/2)`, stored by `w mod n`.
pub fn periodized_samples(gamma: &dyn Fn(f64) -> Complex64, grid: &GridSpec) -> Vec<Complex64> {
    let n = grid.n;
    (0..n).map(|r| gamma(wrap_index(r as i64, n) as f64 * grid.dx())).collect()
}

/// `Γ^±(y_k, η_j) = Δx Σ_l e^{∓2πiη_j z_l} γ(y_k ∓ z_l) f(z_l)`; rows `y_k`, columns `η_j` (physical order).
pub fn gamma_transform(f: &GridFunction, gamma: &dyn Fn(f64) -> Complex64, sign: GammaSign) -> CMatrix {
    gamma_transform_sampled(f, &periodized_samples(gamma, &f.grid), sign)
}

pub fn gamma_transform_sampled(f: &GridFunction, samples: &[Complex64], sign: GammaSign) -> CMatrix {
    let g = f.grid;
    let n = g.n;
    let mut out = CMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        for l in 0..n {
            let off = match sign {
                GammaSign::Plus => (k + n - l) % n,
                GammaSign::Minus => (k + l) % n,
            };
            buf[l] = samples[off] * f.values[l] * g.dx();
        }
        match sign {
            GammaSign::Plus => fft_in_place(&mut buf),
            GammaSign::Minus => ifft_in_place(&mut buf),
        }
        swap_halves(&mut buf);
        for j in 0..n {
            out[(k, j)] = buf[j];
        }
    }
    out
}

/// `(Δx Δξ Σ |Q|²)^{1/2}` for an array on grid × frequency grid.
pub fn two_variable_norm(q: &CMatrix, grid: &GridSpec) -> f64 {
    (grid.dx() * grid.dxi() * q.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// Spectral derivative in the row variable, column by column.
pub fn spectral_row_derivative(q: &CMatrix, grid: &GridSpec) -> CMatrix {
    let n = grid.n;
    let mut out = q.clone();
    for mut col in out.column_iter_mut() {
        let v = col.as_mut_slice();
        fft_in_place(v);
        for (j, c) in v.iter_mut().enumerate() {
            let lam = grid.fft_freq(j);
            // The unpaired Nyquist mode has no real derivative.
            let factor = if j == n / 2 { 0.0 } else { 2.0 * std::f64::consts::PI * lam };
            *c *= Complex64::new(0.0, factor) / n as f64;
        }
        ifft_in_place(v);
    }
    out
}

/// Spectral derivative of periodic samples stored by `w mod n`.
pub fn spectral_derivative_samples(samples: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let m = CMatrix::from_column_slice(grid.n, 1, samples);
    spectral_row_derivative(&m, grid).as_slice().to_vec()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DualityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `(Δλ Σ_λ (1 + 4π²λ²)^{-1})^{1/2}`, the constant that makes the discrete bound exact.
    pub constant: f64,
}

impl DualityCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.constant * self.rhs * (1.0 + 1e-12) + 1e-300
    }
}

pub fn duality_constant(grid: &GridSpec) -> f64 {
    let s: f64 = grid
        .freq_nodes()
        .iter()
        .map(|l| 1.0 / (1.0 + 4.0 * std::f64::consts::PI.powi(2) * l * l))
        .sum();
    (grid.dxi() * s).sqrt()
}

/// `A_Q(x) = Δξ Σ_ξ e^{2πixξ} Q(x, ξ)`; rows `x_k`, columns `ξ_j` (physical order).
pub fn diagonal_synthesis(q: &CMatrix, grid: &GridSpec) -> GridFunction {
    let n = grid.n;
    let up = roots(n, 1.0);
    let values = (0..n)
        .map(|k| {
            let s: Complex64 = (0..n).map(|j| q[(k, j)] * up[(k * grid.fft_slot(grid.freq_index(j))) % n]).sum();
            s * grid.dxi()
        })
        .collect();
    GridFunction { grid: *grid, values }
}

/// Both sides of `‖A_Q‖_{L²} ≤ C ‖(1 − ∂_x) Q‖_{L²}`.
pub fn duality_bound_check(q: &CMatrix, grid: &GridSpec) -> DualityCheck {
    let a = diagonal_synthesis(q, grid);
    let dq = spectral_row_derivative(q, grid);
    let rhs = two_variable_norm(&(q - dq), grid);
    DualityCheck { lhs: a.l2_norm(), rhs, constant: duality_constant(grid) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speed_profiles::{make_symbol_p, make_symbol_p_inv, SpeedProfile, SymbolLabel};

    #[test]
    fn wrap_index_range() {
        assert_eq!(wrap_index(0, 8), 0);
        assert_eq!(wrap_index(4, 8), -4);
        assert_eq!(wrap_index(3, 8), 3);
        assert_eq!(wrap_index(-5, 8), 3);
        assert_eq!(wrap_index(7, 8), -1);
    }

    #[test]
    fn full_window_kernel_matches_semicommutator() {
        let g = GridSpec::new(32, 1.0).unwrap();
        let c = SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15);
        let spec = CommutatorSpec::new(make_symbol_p_inv(&c, &g).unwrap(), make_symbol_p(&c, &g).unwrap(), 0.25);
        let ones = Window {
            symbol: Symbol::multiplier(0.0, SymbolLabel::Custom("one".into()), |_| Complex64::new(1.0, 0.0)),
            support: (0.0, f64::INFINITY),
            index: None,
        };
        let loc = localized_commutator(&spec.clone().localized(ones), &g).unwrap();
        let full = semicommutator(&spec, &g);
        let err = (&loc.matrix - &full.matrix).camax() / full.matrix.camax();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn gamma_plancherel_small() {
        let g = GridSpec::new(32, 2.0).unwrap();
        let f = GridFunction::from_real(g, |x| (x * 3.0).sin() + 0.2);
        for sign in [GammaSign::Plus, GammaSign::Minus] {
            let gam = gamma_transform(&f, &default_gamma, sign);
            let s = periodized_samples(&default_gamma, &g);
            let gn = (g.dx() * s.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
            let lhs = two_variable_norm(&gam, &g);
            assert!((lhs - gn * f.l2_norm()).abs() < 1e-12 * lhs);
        }
    }

    #[test]
    fn duality_constant_tends_to_inverse_sqrt_two() {
        let g = GridSpec::new(4096, 64.0).unwrap();
        assert!((duality_constant(&g) - 0.5f64.sqrt()).abs() < 1e-2);
    }
}
