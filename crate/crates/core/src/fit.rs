//! Least-squares fits for scaling laws.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len().min(y.len());
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let intercept = my - slope * mx;
    let ss_res: f64 = (0..n).map(|i| (y[i] - slope * x[i] - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LinearFit { slope, intercept, r2, points: n }
}

/// `log y ≈ slope·log x + intercept` (natural logs).
pub fn power_law_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// `log2 y ≈ slope·j + intercept`; a geometric decay rate is `−slope`.
pub fn geometric_fit(j: &[f64], y: &[f64]) -> LinearFit {
    let ly: Vec<f64> = y.iter().map(|v| v.log2()).collect();
    linear_fit(j, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (0..8).map(|k| 2f64.powi(-k)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(1.25)).collect();
        let f = power_law_fit(&x, &y);
        assert!((f.slope - 1.25).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert_eq!(f.points, 8);
    }

    #[test]
    fn geometric_rate() {
        let j: Vec<f64> = (0..6).map(|v| v as f64).collect();
        let y: Vec<f64> = j.iter().map(|v| 5.0 * 2f64.powf(-2.5 * v)).collect();
        assert!((geometric_fit(&j, &y).slope + 2.5).abs() < 1e-12);
    }
}
