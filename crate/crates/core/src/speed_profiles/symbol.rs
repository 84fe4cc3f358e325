use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::partition::{bump_profile, dyadic_window};
use super::profile::SpeedProfile;
use crate::error::{LabError, Result};
use crate::grid::{forward_transform, GridFunction, GridSpec, SpectrumFunction};

pub type SymbolFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolLabel {
    D,
    P,
    PInv,
    DT,
    PM,
    Weight,
    Bump,
    Dyadic(i32),
    Product,
    Custom(String),
}

impl fmt::Display for SymbolLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolLabel::D => write!(f, "d"),
            SymbolLabel::P => write!(f, "p"),
            SymbolLabel::PInv => write!(f, "p_inv"),
            SymbolLabel::DT => write!(f, "d_t"),
            SymbolLabel::PM => write!(f, "p_M"),
            SymbolLabel::Weight => write!(f, "weight_s"),
            SymbolLabel::Bump => write!(f, "bump"),
            SymbolLabel::Dyadic(j) => write!(f, "dyadic_{j}"),
            SymbolLabel::Product => write!(f, "product"),
            SymbolLabel::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// An evaluable symbol `a(x, ξ)` with declared growth order `m`.
#[derive(Clone)]
pub struct Symbol {
    pub order: f64,
    pub label: SymbolLabel,
    /// True when `a` does not depend on `x` (a Fourier multiplier).
    pub x_independent: bool,
    eval: Arc<SymbolFn>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("x_independent", &self.x_independent)
            .finish()
    }
}

impl Symbol {
    pub fn new(order: f64, label: SymbolLabel, f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { order, label, x_independent: false, eval: Arc::new(f) }
    }

    pub fn multiplier(order: f64, label: SymbolLabel, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { order, label, x_independent: true, eval: Arc::new(move |_, xi| f(xi)) }
    }

    /// Real-valued helper.
    pub fn real(order: f64, label: SymbolLabel, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(order, label, move |x, xi| Complex64::new(f(x, xi), 0.0))
    }

    #[inline]
    pub fn eval(&self, x: f64, xi: f64) -> Complex64 {
        (self.eval)(x, xi)
    }

    pub fn with_label(mut self, label: SymbolLabel) -> Self {
        self.label = label;
        self
    }

    /// Pointwise product; orders add.
    pub fn product(&self, other: &Symbol) -> Symbol {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Symbol {
            order: self.order + other.order,
            label: SymbolLabel::Product,
            x_independent: self.x_independent && other.x_independent,
            eval: Arc::new(move |x, xi| a(x, xi) * b(x, xi)),
        }
    }

    pub fn scale(&self, s: Complex64) -> Symbol {
        let a = self.eval.clone();
        Symbol { eval: Arc::new(move |x, xi| s * a(x, xi)), ..self.clone() }
    }

    pub fn difference(&self, other: &Symbol) -> Symbol {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Symbol {
            order: self.order.max(other.order),
            label: SymbolLabel::Custom(format!("{}-{}", self.label, other.label)),
            x_independent: self.x_independent && other.x_independent,
            eval: Arc::new(move |x, xi| a(x, xi) - b(x, xi)),
        }
    }

    /// `(x, ξ) ↦ a(x, tξ)`.
    pub fn rescaled_freq(&self, t: f64) -> Symbol {
        let a = self.eval.clone();
        Symbol { eval: Arc::new(move |x, xi| a(x, t * xi)), ..self.clone() }
    }

    /// `(x, ξ) ↦ a(tx, ξ)`.
    pub fn rescaled_space(&self, t: f64) -> Symbol {
        let a = self.eval.clone();
        Symbol { eval: Arc::new(move |x, xi| a(t * x, xi)), ..self.clone() }
    }

    /// Smallest `K` with `|a| ≤ K (1+|ξ|)^m` on the grid nodes.
    pub fn growth_constant(&self, grid: &GridSpec) -> f64 {
        let xi = grid.freq_nodes();
        let mut k = 0.0f64;
        for i in 0..grid.n {
            let x = grid.x(i);
            for &v in &xi {
                k = k.max(self.eval(x, v).norm() / (1.0 + v.abs()).powf(self.order));
            }
        }
        k
    }
}

/// `d(x, ξ) = |ξ| / (1 + c(x)|ξ|)`, order 0.
pub fn make_symbol_d(c: &SpeedProfile, grid: &GridSpec) -> Result<Symbol> {
    c.check_nodes(grid)?;
    let c = c.clone();
    Ok(Symbol::real(0.0, SymbolLabel::D, move |x, xi| {
        let a = xi.abs();
        a / (1.0 + c.eval(x) * a)
    }))
}

/// `p(x, ξ) = (1 + c(x)|ξ|)^{1/c(x)}`, order `m1 = 1/c1`.
pub fn make_symbol_p(c: &SpeedProfile, grid: &GridSpec) -> Result<Symbol> {
    c.check_nodes(grid)?;
    let order = c.m1();
    let c = c.clone();
    Ok(Symbol::real(order, SymbolLabel::P, move |x, xi| {
        let cx = c.eval(x);
        (1.0 + cx * xi.abs()).powf(1.0 / cx)
    }))
}

/// `p⁻¹(x, ξ) = (1 + c(x)|ξ|)^{-1/c(x)}`, order `−m2 = −1/c2`.
pub fn make_symbol_p_inv(c: &SpeedProfile, grid: &GridSpec) -> Result<Symbol> {
    c.check_nodes(grid)?;
    let order = -c.m2();
    let c = c.clone();
    Ok(Symbol::real(order, SymbolLabel::PInv, move |x, xi| {
        let cx = c.eval(x);
        (1.0 + cx * xi.abs()).powf(-1.0 / cx)
    }))
}

/// `d_t(x, ξ) = |ξ| / (1 + c(x) t |ξ|)`; at `t = 0` this is `|ξ|`.
pub fn make_symbol_d_t(c: &SpeedProfile, t: f64) -> Result<Symbol> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(LabError::Config(format!("semiclassical parameter t = {t} must be >= 0")));
    }
    let order = if t == 0.0 { 1.0 } else { 0.0 };
    let c = c.clone();
    Ok(Symbol::real(order, SymbolLabel::DT, move |x, xi| {
        let a = xi.abs();
        a / (1.0 + c.eval(x) * t * a)
    }))
}

/// `p_M(x, ξ) = −(ρ2 − ρ1)|ξ| / (1 + f'(x)²)`, with `f'` trigonometrically interpolated off the nodes.
pub fn make_symbol_p_m(densities: (f64, f64), interface_slope: &GridFunction) -> Result<Symbol> {
    let (rho1, rho2) = densities;
    if rho1 == rho2 {
        return Err(LabError::UnsupportedSymbol("equal densities give the zero symbol".into()));
    }
    let slope = TrigInterpolant::new(interface_slope);
    Ok(Symbol::real(1.0, SymbolLabel::PM, move |x, xi| {
        let s = slope.eval(x);
        -(rho2 - rho1) * xi.abs() / (1.0 + s * s)
    }))
}

/// `⟨ξ⟩^s = (1 + 2πiξ)^s`, principal branch.
pub fn make_weight(s: f64) -> Symbol {
    Symbol::multiplier(s, SymbolLabel::Weight, move |xi| {
        if s == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(1.0, 2.0 * std::f64::consts::PI * xi).powf(s)
        }
    })
}

/// `φ_j(ξ)` for `j ≥ −1` as a multiplier symbol.
pub fn make_dyadic_window(j: i32) -> Symbol {
    Symbol::real(0.0, SymbolLabel::Dyadic(j), move |_, xi| dyadic_window(j, xi)).as_multiplier()
}

/// `φ_{−1}, …, φ_{j_max}`.
pub fn make_dyadic_partition(j_max: i32) -> Vec<Symbol> {
    (-1..=j_max).map(make_dyadic_window).collect()
}

/// Smooth bump of `x` equal to 1 on `|x − x0| ≤ ε/2` and supported in `|x − x0| < ε`.
pub fn make_bump(center: f64, radius: f64, period: f64) -> Result<Symbol> {
    if !(radius > 0.0) || radius > 0.5 * period {
        return Err(LabError::Config(format!("bump radius {radius} must lie in (0, period/2]")));
    }
    Ok(Symbol::real(0.0, SymbolLabel::Bump, move |x, _| bump_profile(x, center, radius, period)))
}

impl Symbol {
    fn as_multiplier(mut self) -> Self {
        self.x_independent = true;
        self
    }
}

/// Which member of the `{d, p, p⁻¹}` family a symbol is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    D,
    P,
    PInv,
}

impl SymbolKind {
    pub fn build(self, c: &SpeedProfile, grid: &GridSpec) -> Result<Symbol> {
        match self {
            SymbolKind::D => make_symbol_d(c, grid),
            SymbolKind::P => make_symbol_p(c, grid),
            SymbolKind::PInv => make_symbol_p_inv(c, grid),
        }
    }
}

/// Splits `a = Π + Σ0` where `Σ0` freezes `c ≡ c0`.
pub fn decompose_pi_sigma(kind: SymbolKind, c: &SpeedProfile, grid: &GridSpec) -> Result<(Symbol, Symbol)> {
    let a = kind.build(c, grid)?;
    let c0 = c.c0;
    if !(c0 > c.c1 && c0 < c.c2) {
        return Err(LabError::Admissibility(format!("baseline c0 = {c0} outside ({}, {})", c.c1, c.c2)));
    }
    let sigma = Symbol::multiplier(a.order, SymbolLabel::Custom(format!("sigma0_{}", a.label)), move |xi| {
        let u = xi.abs();
        Complex64::new(
            match kind {
                SymbolKind::D => u / (1.0 + c0 * u),
                SymbolKind::P => (1.0 + c0 * u).powf(1.0 / c0),
                SymbolKind::PInv => (1.0 + c0 * u).powf(-1.0 / c0),
            },
            0.0,
        )
    });
    let pi = a.difference(&sigma).with_label(SymbolLabel::Custom(format!("pi_{}", a.label)));
    Ok((pi, sigma))
}

/// Band-limited interpolant through grid samples.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    spectrum: SpectrumFunction,
}

impl TrigInterpolant {
    pub fn new(f: &GridFunction) -> Self {
        Self { spectrum: forward_transform(f) }
    }

    /// Real part of `Δξ Σ f̂(ξ_m) e^{2πixξ_m}`, with the unpaired Nyquist mode taken as a cosine.
    pub fn eval(&self, x: f64) -> f64 {
        let g = self.spectrum.grid;
        let xi = g.freq_nodes();
        let mut s = Complex64::new(0.0, 0.0);
        for (j, c) in self.spectrum.coeffs.iter().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * x * xi[j];
            if j == 0 {
                s += c * phase.cos();
            } else {
                s += c * Complex64::from_polar(1.0, phase);
            }
        }
        (s * g.dxi()).re
    }
}
