//! Semiclassical Sobolev norms with weight `|1 + 2πitξ|^s`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{forward_transform, inverse_transform, GridFunction, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevWeight {
    pub s: f64,
    pub t: f64,
}

impl SobolevWeight {
    pub fn new(s: f64, t: f64) -> Self {
        Self { s, t }
    }

    /// `(1 + 4π²t²ξ²)^{s/2}`.
    pub fn magnitude(&self, xi: f64) -> f64 {
        if self.s == 0.0 {
            return 1.0;
        }
        (1.0 + 4.0 * PI * PI * self.t * self.t * xi * xi).powf(0.5 * self.s)
    }

    /// `(1 + 2πitξ)^s`, principal branch.
    pub fn complex(&self, xi: f64) -> Complex64 {
        if self.s == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::new(1.0, 2.0 * PI * self.t * xi).powf(self.s)
    }

    /// Magnitudes in FFT slot order.
    pub fn fft_order(&self, grid: &GridSpec) -> Vec<f64> {
        (0..grid.n).map(|j| self.magnitude(grid.fft_freq(j))).collect()
    }
}

/// `(Δξ Σ |1 + 2πitξ_m|^{2s} |f̂(ξ_m)|²)^{1/2}`.
pub fn hst_norm(f: &GridFunction, s: f64, t: f64) -> f64 {
    let w = SobolevWeight::new(s, t);
    let fh = forward_transform(f);
    let xi = f.grid.freq_nodes();
    let sum: f64 = fh.coeffs.iter().zip(xi).map(|(c, x)| w.magnitude(x).powi(2) * c.norm_sqr()).sum();
    (f.grid.dxi() * sum).sqrt()
}

/// Fourier-diagonal application of `(1 + 2πitξ)^s`.
pub fn apply_weight(f: &GridFunction, s: f64, t: f64) -> GridFunction {
    let w = SobolevWeight::new(s, t);
    let mut fh = forward_transform(f);
    let xi = f.grid.freq_nodes();
    fh.coeffs.iter_mut().zip(xi).for_each(|(c, x)| *c *= w.complex(x));
    inverse_transform(&fh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::l2_norm;

    #[test]
    fn zero_order_is_l2() {
        let g = GridSpec::new(64, 3.0).unwrap();
        let f = GridFunction::from_real(g, |x| (-(x - 1.5) * (x - 1.5)).exp());
        assert!((hst_norm(&f, 0.0, 0.3) - l2_norm(&f)).abs() < 1e-13);
    }

    #[test]
    fn pure_mode_weight() {
        let g = GridSpec::new(64, 1.0).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * 5.0 * x));
        let (s, t) = (1.7, 0.25);
        let want = (1.0 + 4.0 * PI * PI * t * t * 25.0f64).powf(s / 2.0);
        assert!((hst_norm(&f, s, t) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn weight_round_trip() {
        let g = GridSpec::new(128, 2.0).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new(x.sin(), (3.0 * x).cos()));
        let back = apply_weight(&apply_weight(&f, 1.3, 0.5), -1.3, 0.5);
        let err = l2_norm(&back.axpy(Complex64::new(-1.0, 0.0), &f));
        assert!(err < 1e-12 * l2_norm(&f));
        assert!((hst_norm(&f, 1.3, 0.5) - l2_norm(&apply_weight(&f, 1.3, 0.5))).abs() < 1e-12);
    }
}
