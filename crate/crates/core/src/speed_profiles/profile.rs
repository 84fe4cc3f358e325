use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{wrapped_offset, GridSpec};

/// Mixing speed `c(x) = c0 + perturbation(x)` with its declared bounds `(c1, c2)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub c0: f64,
    #[serde(default)]
    pub perturbation: Perturbation,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Perturbation {
    #[default]
    None,
    /// `amplitude · exp(-((x - center)/width)²)`, summed over images when `period` is set.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
        #[serde(default)]
        period: Option<f64>,
    },
    /// `amplitude · cos(2π · wavenumber · x)`.
    Cosine { amplitude: f64, wavenumber: f64 },
    /// `amplitude · (2|sin(πx/period)|^exponent − 1)`; lies in `W^{k,∞}` for `k < exponent`.
    PowerSine { amplitude: f64, period: f64, exponent: f64 },
    /// Equals `c_loc` within `inner` of `center`, returns smoothly to `c0` beyond `outer`.
    Plateau { c_loc: f64, center: f64, inner: f64, outer: f64, period: f64 },
    /// Samples of the full speed `c(x)` on one period, interpolated by a periodic cubic spline.
    Tabulated {
        #[serde(default)]
        x: Vec<f64>,
        #[serde(default)]
        c: Vec<f64>,
        period: f64,
        /// Two-column `x,c` file read by [`SpeedProfile::resolve`].
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<String>,
        #[serde(skip)]
        spline: OnceLock<PeriodicSpline>,
    },
}

impl SpeedProfile {
    pub fn constant(c0: f64, c1: f64, c2: f64) -> Self {
        Self { c0, perturbation: Perturbation::None, c1, c2 }
    }

    pub fn cosine(c0: f64, amplitude: f64, wavenumber: f64, c1: f64, c2: f64) -> Self {
        Self { c0, perturbation: Perturbation::Cosine { amplitude, wavenumber }, c1, c2 }
    }

    pub fn power_sine(c0: f64, amplitude: f64, period: f64, exponent: f64, c1: f64, c2: f64) -> Self {
        Self { c0, perturbation: Perturbation::PowerSine { amplitude, period, exponent }, c1, c2 }
    }

    pub fn gaussian(c0: f64, amplitude: f64, center: f64, width: f64, period: Option<f64>, c1: f64, c2: f64) -> Self {
        Self { c0, perturbation: Perturbation::Gaussian { amplitude, center, width, period }, c1, c2 }
    }

    pub fn plateau(c_far: f64, c_loc: f64, center: f64, inner: f64, outer: f64, period: f64, c1: f64, c2: f64) -> Self {
        Self {
            c0: c_far,
            perturbation: Perturbation::Plateau { c_loc, center, inner, outer, period },
            c1,
            c2,
        }
    }

    pub fn tabulated(c0: f64, x: Vec<f64>, c: Vec<f64>, period: f64, c1: f64, c2: f64) -> Result<Self> {
        let p = Self {
            c0,
            perturbation: Perturbation::Tabulated { x, c, period, csv: None, spline: OnceLock::new() },
            c1,
            c2,
        };
        p.validate_table()?;
        Ok(p)
    }

    /// Reads `x,c` rows (an optional header line is skipped).
    pub fn tabulated_from_csv(path: &Path, c0: f64, period: f64, c1: f64, c2: f64) -> Result<Self> {
        let (x, c) = read_table(path)?;
        Self::tabulated(c0, x, c, period, c1, c2)
    }

    /// Loads CSV-backed tables relative to `base`.
    pub fn resolve(&mut self, base: &Path) -> Result<()> {
        if let Perturbation::Tabulated { x, c, csv: Some(file), spline, .. } = &mut self.perturbation {
            if x.is_empty() {
                let (tx, tc) = read_table(&base.join(file.as_str()))?;
                *x = tx;
                *c = tc;
                *spline = OnceLock::new();
            }
        }
        self.validate_table()
    }

    fn validate_table(&self) -> Result<()> {
        if let Perturbation::Tabulated { x, c, period, .. } = &self.perturbation {
            if x.len() != c.len() || x.len() < 4 {
                return Err(LabError::Config("tabulated profile needs >= 4 matching (x, c) rows".into()));
            }
            if x.windows(2).any(|w| w[1] <= w[0]) || x[0] < 0.0 || *x.last().unwrap() >= *period {
                return Err(LabError::Config("tabulated x must increase strictly within [0, period)".into()));
            }
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.perturbation, Perturbation::None)
    }

    /// `c(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.perturbation {
            Perturbation::None => self.c0,
            Perturbation::Gaussian { amplitude, center, width, period } => {
                let g = |y: f64| (-(y / width).powi(2)).exp();
                let bump = match period {
                    None => g(x - center),
                    Some(p) => {
                        let r = wrapped_offset(x, *center, *p);
                        (-3..=3).map(|k| g(r + k as f64 * p)).sum()
                    }
                };
                self.c0 + amplitude * bump
            }
            Perturbation::Cosine { amplitude, wavenumber } => {
                self.c0 + amplitude * (2.0 * PI * wavenumber * x).cos()
            }
            Perturbation::PowerSine { amplitude, period, exponent } => {
                let s = (PI * x / period).sin().abs();
                self.c0 + amplitude * (2.0 * s.powf(*exponent) - 1.0)
            }
            Perturbation::Plateau { c_loc, center, inner, outer, period } => {
                let r = wrapped_offset(x, *center, *period).abs();
                let w = smooth_step((outer - r) / (outer - inner));
                c_loc + (self.c0 - c_loc) * (1.0 - w)
            }
            Perturbation::Tabulated { x: xs, c, period, spline, .. } => {
                spline.get_or_init(|| PeriodicSpline::new(xs, c, *period)).eval(x)
            }
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Vec<f64> {
        (0..grid.n).map(|k| self.eval(grid.x(k))).collect()
    }

    pub fn c_min(&self, grid: &GridSpec) -> f64 {
        self.sample(grid).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Declared order of `p`, `m1 = 1/c1`.
    pub fn m1(&self) -> f64 {
        1.0 / self.c1
    }

    pub fn m2(&self) -> f64 {
        1.0 / self.c2
    }

    /// Bound-pair check `0 < c1 < c2 ≤ 2`, `1/c1 − 1/c2 ≤ 1`.
    pub fn check_pair(&self) -> Result<()> {
        let (c1, c2) = (self.c1, self.c2);
        if !(c1 > 0.0 && c1 < c2 && c2 <= 2.0) {
            return Err(LabError::Admissibility(format!("bounds ({c1}, {c2}) violate 0 < c1 < c2 <= 2")));
        }
        if 1.0 / c1 - 1.0 / c2 > 1.0 + 1e-15 {
            return Err(LabError::Admissibility(format!("bounds ({c1}, {c2}) violate 1/c1 - 1/c2 <= 1")));
        }
        Ok(())
    }

    /// Strict `c1 < c(x_k) < c2` on every node, together with the pair check.
    pub fn check_nodes(&self, grid: &GridSpec) -> Result<()> {
        self.check_pair()?;
        for k in 0..grid.n {
            let c = self.eval(grid.x(k));
            if !(c > self.c1 && c < self.c2) {
                return Err(LabError::Admissibility(format!(
                    "c(x) = {c} at x = {} leaves ({}, {})",
                    grid.x(k),
                    self.c1,
                    self.c2
                )));
            }
        }
        Ok(())
    }
}

fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut x = Vec::new();
    let mut c = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let parsed = (cols.next().map(str::parse::<f64>), cols.next().map(str::parse::<f64>));
        match parsed {
            (Some(Ok(a)), Some(Ok(b))) => {
                x.push(a);
                c.push(b);
            }
            _ if i == 0 => continue,
            _ => return Err(LabError::Config(format!("{}: bad row {}", path.display(), i + 1))),
        }
    }
    Ok((x, c))
}

/// `C^∞` step: 0 for `u ≤ 0`, 1 for `u ≥ 1`, built from `e^{-1/u}`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

/// Periodic cubic spline through `(x_i, y_i)` on a circle of length `period`.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    period: f64,
}

impl PeriodicSpline {
    pub fn new(x: &[f64], y: &[f64], period: f64) -> Self {
        let n = x.len();
        let h: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { x[i + 1] - x[i] } else { x[0] + period - x[n - 1] })
            .collect();
        // Second derivatives M_i from the cyclic system
        // h_{i-1} M_{i-1} + 2(h_{i-1}+h_i) M_i + h_i M_{i+1} = 6(Δ_i − Δ_{i-1}).
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        for i in 0..n {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            a[(i, im)] += h[im];
            a[(i, i)] += 2.0 * (h[im] + h[i]);
            a[(i, ip)] += h[i];
            rhs[i] = 6.0 * ((y[ip] - y[i]) / h[i] - (y[i] - y[im]) / h[im]);
        }
        let m = a.lu().solve(&rhs).map(|v| v.iter().copied().collect()).unwrap_or_else(|| vec![0.0; n]);
        Self { x: x.to_vec(), y: y.to_vec(), m, period }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        let mut u = (x - self.x[0]).rem_euclid(self.period) + self.x[0];
        let i = match self.x.partition_point(|&v| v <= u) {
            0 => n - 1,
            j => j - 1,
        };
        if i == n - 1 && u < self.x[0] {
            u += self.period;
        }
        let ip = (i + 1) % n;
        let h = if i + 1 < n { self.x[i + 1] - self.x[i] } else { self.x[0] + self.period - self.x[i] };
        let a = (self.x[i] + h - u) / h;
        let b = (u - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[ip]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[ip]) * h * h / 6.0
    }
}
