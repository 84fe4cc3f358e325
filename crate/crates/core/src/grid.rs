//! Periodic grid on `[0, L)` and the discrete Fourier pair with `2π` in the exponent.
//!
//! Forward: `f̂(ξ_m) = Δx Σ_k f(x_k) e^{-2πi x_k ξ_m}`.
//! Inverse: `f(x_k) = Δξ Σ_m f̂(ξ_m) e^{2πi x_k ξ_m}`.
//!
//! Spectra are stored in physical order `m = -n/2 .. n/2-1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub period: f64,
}

impl GridSpec {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(LabError::Config(format!("grid size {n} must be a power of two >= 16")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(LabError::Config(format!("grid period {period} must be positive")));
        }
        Ok(Self { n, period })
    }

    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        1.0 / self.period
    }

    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.dx()
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    /// Signed frequency index of physical slot `j` (0 ↦ -n/2).
    pub fn freq_index(&self, j: usize) -> i64 {
        j as i64 - (self.n / 2) as i64
    }

    pub fn freq_nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.freq_index(j) as f64 * self.dxi()).collect()
    }

    /// Frequency attached to FFT slot `j` (unshifted order).
    pub fn fft_freq(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as i64 } else { j as i64 - self.n as i64 };
        m as f64 * self.dxi()
    }

    /// Largest |ξ| on the grid, `n/(2L)`.
    pub fn xi_max(&self) -> f64 {
        self.n as f64 / (2.0 * self.period)
    }

    pub fn fft_slot(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

/// Cached forward/inverse plans of length `n` (unnormalized, rustfft sign conventions).
pub fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (
                planner.plan_fft(n, FftDirection::Forward),
                planner.plan_fft(n, FftDirection::Inverse),
            )
        })
        .clone()
}

/// Unnormalized `Σ_k v_k e^{-2πi jk/n}` in place.
pub fn fft_in_place(v: &mut [Complex64]) {
    plans(v.len()).0.process(v);
}

/// Unnormalized `Σ_k v_k e^{+2πi jk/n}` in place.
pub fn ifft_in_place(v: &mut [Complex64]) {
    plans(v.len()).1.process(v);
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFunction {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(LabError::Shape { expected: grid.n, found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.n] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        Self { grid, values: (0..grid.n).map(|k| f(grid.x(k))).collect() }
    }

    pub fn from_real(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * a).collect() }
    }

    pub fn axpy(&self, a: Complex64, other: &GridFunction) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(u, v)| u + a * v).collect();
        Self { grid: self.grid, values }
    }

    pub fn pointwise(&self, w: &[f64]) -> Self {
        let values = self.values.iter().zip(w).map(|(u, s)| u * s).collect();
        Self { grid: self.grid, values }
    }

    /// Discrete inner product `Δx Σ f conj(g)`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        s * self.grid.dx()
    }
}

impl SpectrumFunction {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(LabError::Shape { expected: grid.n, found: coeffs.len() });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let coeffs = grid.freq_nodes().into_iter().map(f).collect();
        Self { grid, coeffs }
    }

    /// `(Δξ Σ |f̂|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.dxi() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn coeff(&self, m: i64) -> Complex64 {
        self.coeffs[(m + (self.grid.n / 2) as i64) as usize]
    }
}

/// Physical order ↔ FFT order swap (its own inverse for even n).
pub fn swap_halves<T: Copy>(v: &mut [T]) {
    let h = v.len() / 2;
    for j in 0..h {
        v.swap(j, j + h);
    }
}

pub fn forward_transform(f: &GridFunction) -> SpectrumFunction {
    let g = f.grid;
    let mut buf = f.values.clone();
    fft_in_place(&mut buf);
    swap_halves(&mut buf);
    // x_k ξ_m = km/n, so the FFT phase is exact; only the Δx scale is missing.
    let dx = g.dx();
    buf.iter_mut().for_each(|c| *c *= dx);
    SpectrumFunction { grid: g, coeffs: buf }
}

pub fn inverse_transform(fh: &SpectrumFunction) -> GridFunction {
    let g = fh.grid;
    let mut buf = fh.coeffs.clone();
    swap_halves(&mut buf);
    ifft_in_place(&mut buf);
    let dxi = g.dxi();
    buf.iter_mut().for_each(|c| *c *= dxi);
    GridFunction { grid: g, values: buf }
}

/// `(Δx Σ |f(x_k)|²)^{1/2}`.
pub fn l2_norm(f: &GridFunction) -> f64 {
    (f.grid.dx() * f.values.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

/// Applies a real or complex Fourier multiplier `m(ξ)`.
pub fn apply_multiplier(f: &GridFunction, m: impl Fn(f64) -> Complex64) -> GridFunction {
    let mut fh = forward_transform(f);
    let xi = f.grid.freq_nodes();
    fh.coeffs.iter_mut().zip(xi).for_each(|(c, x)| *c *= m(x));
    inverse_transform(&fh)
}

/// Wrapped signed distance from `x` to `center` on a circle of length `period`.
pub fn wrapped_offset(x: f64, center: f64, period: f64) -> f64 {
    (x - center + 0.5 * period).rem_euclid(period) - 0.5 * period
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(12, 1.0).is_err());
        assert!(GridSpec::new(8, 1.0).is_err());
        assert!(GridSpec::new(64, 0.0).is_err());
        assert!(GridSpec::new(64, 1.0).is_ok());
    }

    #[test]
    fn spacings_are_dual() {
        let g = GridSpec::new(128, 3.5).unwrap();
        assert!((g.dx() * g.dxi() * g.n as f64 - 1.0).abs() < 1e-15);
        let xi = g.freq_nodes();
        assert_eq!(xi[0], -g.xi_max());
        assert!((xi[1] + xi[g.n - 1]).abs() < 1e-12);
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let g = GridSpec::new(64, 1.0).unwrap();
        let fh = forward_transform(&GridFunction::from_real(g, |_| 1.0));
        for m in -32..32 {
            let want = if m == 0 { 1.0 } else { 0.0 };
            assert!((fh.coeff(m) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn pure_mode() {
        let g = GridSpec::new(64, 2.0).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x / 2.0));
        let fh = forward_transform(&f);
        assert!((fh.coeff(1) - 2.0).norm() < 1e-13);
        assert!((fh.coeffs.iter().map(|c| c.norm()).sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l2_of_constant() {
        let g = GridSpec::new(32, 2.0).unwrap();
        assert!((GridFunction::from_real(g, |_| 1.0).l2_norm() - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(GridFunction::zeros(g).l2_norm(), 0.0);
    }

    #[test]
    fn wrapped_offset_is_centered() {
        assert!((wrapped_offset(0.9, 0.1, 1.0) + 0.2).abs() < 1e-14);
        assert!((wrapped_offset(0.3, 0.1, 1.0) - 0.2).abs() < 1e-14);
    }
}
