//! Dense realizations of `a(x,D)` and `a(x,tD)` on the periodic grid.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{fft_in_place, forward_transform, ifft_in_place, GridFunction, GridSpec};
use crate::norms::SobolevWeight;
use crate::speed_profiles::Symbol;

/// Largest size for which norms default to a full SVD.
pub const SVD_MAX_N: usize = 512;
pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_ITER: usize = 10_000;
pub const POWER_SEED: u64 = 0x5eed_2024;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantizationMode {
    Canonical,
    Semiclassical { t: f64 },
}

#[derive(Debug, Clone)]
pub struct QuantizedOperator {
    pub grid: GridSpec,
    pub matrix: CMatrix,
    pub mode: QuantizationMode,
    pub symbol_label: String,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Row `k` of the kernel: `b_k(j) = Σ_m a(x_k, ξ_m) e^{2πi jm/n}` in FFT slot order.
fn kernel_row(a: &Symbol, grid: &GridSpec, x: f64, t: f64, buf: &mut [Complex64]) {
    for (j, v) in buf.iter_mut().enumerate() {
        *v = a.eval(x, t * grid.fft_freq(j));
    }
    ifft_in_place(buf);
}

fn assemble(a: &Symbol, grid: &GridSpec, t: f64) -> CMatrix {
    let n = grid.n;
    let scale = 1.0 / n as f64;
    let mut m = CMatrix::from_element(n, n, zero());
    let mut buf = vec![zero(); n];
    if a.x_independent {
        kernel_row(a, grid, 0.0, t, &mut buf);
    }
    for k in 0..n {
        if !a.x_independent {
            kernel_row(a, grid, grid.x(k), t, &mut buf);
        }
        for l in 0..n {
            m[(k, l)] = buf[(k + n - l) % n] * scale;
        }
    }
    m
}

/// `A[k,l] = (1/n) Σ_m a(x_k, ξ_m) e^{2πi(k−l)m/n}`.
pub fn quantize_canonical(a: &Symbol, grid: &GridSpec) -> QuantizedOperator {
    QuantizedOperator {
        grid: *grid,
        matrix: assemble(a, grid, 1.0),
        mode: QuantizationMode::Canonical,
        symbol_label: a.label.to_string(),
    }
}

/// Canonical quantization of `(x, ξ) ↦ a(x, tξ)`.
pub fn quantize_semiclassical(a: &Symbol, t: f64, grid: &GridSpec) -> QuantizedOperator {
    QuantizedOperator {
        grid: *grid,
        matrix: assemble(a, grid, t),
        mode: QuantizationMode::Semiclassical { t },
        symbol_label: a.label.to_string(),
    }
}

/// `Δξ Σ_m a(x_k, tξ_m) f̂(ξ_m) e^{2πi x_k ξ_m}` evaluated directly, without a matrix.
pub fn apply_symbol(a: &Symbol, t: f64, f: &GridFunction) -> GridFunction {
    let g = f.grid;
    apply_rowwise(f, |k, xi| a.eval(g.x(k), t * xi))
}

/// Transform, then synthesize row by row with `eval(k, ξ_m)` as the symbol value at `(x_k, ξ_m)`.
pub fn apply_rowwise(f: &GridFunction, eval: impl Fn(usize, f64) -> Complex64) -> GridFunction {
    let g = f.grid;
    let n = g.n;
    let fh = forward_transform(f);
    let dxi = g.dxi();
    let roots: Vec<Complex64> =
        (0..n).map(|r| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / n as f64)).collect();
    let xi = g.freq_nodes();
    let active: Vec<(usize, f64, Complex64)> = (0..n)
        .filter(|&j| fh.coeffs[j] != zero())
        .map(|j| (g.fft_slot(g.freq_index(j)), xi[j], fh.coeffs[j]))
        .collect();
    let values = (0..n)
        .map(|k| {
            let mut s = zero();
            for &(slot, x, c) in &active {
                s += eval(k, x) * c * roots[(k * slot) % n];
            }
            s * dxi
        })
        .collect();
    GridFunction { grid: g, values }
}

impl QuantizedOperator {
    pub fn identity(grid: &GridSpec) -> Self {
        Self {
            grid: *grid,
            matrix: CMatrix::identity(grid.n, grid.n),
            mode: QuantizationMode::Canonical,
            symbol_label: "identity".into(),
        }
    }

    /// Multiplication by `w(x_k)`.
    pub fn multiplication(grid: &GridSpec, w: &[f64], label: &str) -> Self {
        let diag = DVector::from_iterator(grid.n, w.iter().map(|&v| Complex64::new(v, 0.0)));
        Self {
            grid: *grid,
            matrix: CMatrix::from_diagonal(&diag),
            mode: QuantizationMode::Canonical,
            symbol_label: label.into(),
        }
    }

    pub fn t(&self) -> f64 {
        match self.mode {
            QuantizationMode::Canonical => 1.0,
            QuantizationMode::Semiclassical { t } => t,
        }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.grid != self.grid {
            return Err(LabError::GridMismatch);
        }
        let v = DVector::from_column_slice(&f.values);
        let out = &self.matrix * v;
        Ok(GridFunction { grid: self.grid, values: out.as_slice().to_vec() })
    }

    pub fn compose(&self, other: &QuantizedOperator) -> Result<QuantizedOperator> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch);
        }
        Ok(QuantizedOperator {
            grid: self.grid,
            matrix: &self.matrix * &other.matrix,
            mode: self.mode,
            symbol_label: format!("{}*{}", self.symbol_label, other.symbol_label),
        })
    }

    pub fn adjoint(&self) -> QuantizedOperator {
        QuantizedOperator {
            grid: self.grid,
            matrix: self.matrix.adjoint(),
            mode: self.mode,
            symbol_label: format!("({})^*", self.symbol_label),
        }
    }

    pub fn sub(&self, other: &QuantizedOperator) -> Result<QuantizedOperator> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch);
        }
        Ok(QuantizedOperator {
            grid: self.grid,
            matrix: &self.matrix - &other.matrix,
            mode: self.mode,
            symbol_label: format!("{}-{}", self.symbol_label, other.symbol_label),
        })
    }

    pub fn add(&self, other: &QuantizedOperator) -> Result<QuantizedOperator> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch);
        }
        Ok(QuantizedOperator {
            grid: self.grid,
            matrix: &self.matrix + &other.matrix,
            mode: self.mode,
            symbol_label: format!("{}+{}", self.symbol_label, other.symbol_label),
        })
    }

    pub fn scaled(&self, s: f64) -> QuantizedOperator {
        QuantizedOperator { matrix: &self.matrix * Complex64::new(s, 0.0), ..self.clone() }
    }

    /// `F A F^*` with the unitary DFT, rows and columns in FFT slot order.
    pub fn fourier_matrix(&self) -> CMatrix {
        fourier_conjugate(&self.matrix)
    }

    /// Largest off-diagonal modulus of the Fourier matrix relative to the largest entry.
    pub fn fourier_offdiag_ratio(&self) -> f64 {
        let b = self.fourier_matrix();
        let n = b.nrows();
        let (mut off, mut all) = (0.0f64, 0.0f64);
        for j in 0..n {
            for i in 0..n {
                let v = b[(i, j)].norm();
                all = all.max(v);
                if i != j {
                    off = off.max(v);
                }
            }
        }
        if all == 0.0 {
            0.0
        } else {
            off / all
        }
    }

    /// `W_{s_b} F A F^* W_{s_a}^{-1}`.
    pub fn weighted_fourier_matrix(&self, s_from: f64, s_to: f64, t: f64) -> CMatrix {
        let mut b = self.fourier_matrix();
        let wa = SobolevWeight::new(s_from, t).fft_order(&self.grid);
        let wb = SobolevWeight::new(s_to, t).fft_order(&self.grid);
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                b[(i, j)] *= wb[i] / wa[j];
            }
        }
        b
    }

    /// Norm `H^{s_from}_t → H^{s_to}_t`; SVD up to [`SVD_MAX_N`], power iteration above.
    pub fn operator_norm(&self, s_from: f64, s_to: f64, t: f64) -> Result<f64> {
        let method = if self.grid.n <= SVD_MAX_N { NormMethod::Svd } else { NormMethod::Power };
        self.operator_norm_with(s_from, s_to, t, method)
    }

    pub fn operator_norm_with(&self, s_from: f64, s_to: f64, t: f64, method: NormMethod) -> Result<f64> {
        let b = self.weighted_fourier_matrix(s_from, s_to, t);
        match method {
            NormMethod::Svd => Ok(largest_singular_value(&b)),
            NormMethod::Power => power_iteration(&b, POWER_TOL, POWER_MAX_ITER).map(|r| r.sigma),
        }
    }

    /// Smallest singular value of the weighted operator (always by SVD).
    pub fn smallest_singular_value(&self, s_from: f64, s_to: f64, t: f64) -> f64 {
        let b = self.weighted_fourier_matrix(s_from, s_to, t);
        b.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Raw matrix (row-major, little-endian `f64` re/im pairs) plus a JSON sidecar.
    pub fn export(&self, bin_path: &Path) -> Result<()> {
        let n = self.grid.n;
        let mut bytes = Vec::with_capacity(n * n * 16);
        for k in 0..n {
            for l in 0..n {
                let v = self.matrix[(k, l)];
                bytes.extend_from_slice(&v.re.to_le_bytes());
                bytes.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        std::fs::File::create(bin_path)?.write_all(&bytes)?;
        let sidecar = OperatorSidecar {
            grid: self.grid,
            symbol_label: self.symbol_label.clone(),
            mode: self.mode,
            t: self.t(),
            layout: "row-major complex pairs, little-endian f64".into(),
        };
        let json = serde_json::to_string_pretty(&sidecar)?;
        std::fs::write(bin_path.with_extension("json"), json)?;
        Ok(())
    }

    pub fn import(bin_path: &Path) -> Result<Self> {
        let sidecar: OperatorSidecar = serde_json::from_str(&std::fs::read_to_string(bin_path.with_extension("json"))?)?;
        let bytes = std::fs::read(bin_path)?;
        let n = sidecar.grid.n;
        if bytes.len() != n * n * 16 {
            return Err(LabError::Shape { expected: n * n * 16, found: bytes.len() });
        }
        let f = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
        let matrix = CMatrix::from_fn(n, n, |k, l| {
            let i = 2 * (k * n + l);
            Complex64::new(f(i), f(i + 1))
        });
        Ok(Self { grid: sidecar.grid, matrix, mode: sidecar.mode, symbol_label: sidecar.symbol_label })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorSidecar {
    pub grid: GridSpec,
    pub symbol_label: String,
    pub mode: QuantizationMode,
    pub t: f64,
    pub layout: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    Svd,
    Power,
}

/// `F A F^*` for a square matrix, unitary DFT, FFT slot order.
pub fn fourier_conjugate(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let s = 1.0 / (n as f64).sqrt();
    let mut x = a.clone();
    for mut col in x.column_iter_mut() {
        let v = col.as_mut_slice();
        fft_in_place(v);
        v.iter_mut().for_each(|c| *c *= s);
    }
    // (X F^*)ᵀ = F̄ Xᵀ, and F̄ v is the unnormalized inverse FFT.
    let mut y = x.transpose();
    for mut col in y.column_iter_mut() {
        let v = col.as_mut_slice();
        ifft_in_place(v);
        v.iter_mut().for_each(|c| *c *= s);
    }
    y.transpose()
}

pub fn largest_singular_value(m: &CMatrix) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy)]
pub struct PowerResult {
    pub sigma: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Power iteration on `M^* M` from a fixed-seed start.
pub fn power_iteration(m: &CMatrix, tol: f64, max_iter: usize) -> Result<PowerResult> {
    let n = m.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut v = DVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    v /= Complex64::new(v.norm(), 0.0);
    let mut lam = 0.0f64;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let w = m * &v;
        let y = m.ad_mul(&w);
        let next = y.norm();
        if next == 0.0 {
            return Ok(PowerResult { sigma: 0.0, iterations: it, residual: 0.0 });
        }
        residual = (next - lam).abs() / next;
        v = y / Complex64::new(next, 0.0);
        if residual <= tol {
            return Ok(PowerResult { sigma: next.sqrt(), iterations: it, residual });
        }
        lam = next;
    }
    Err(LabError::NoConvergence { iterations: max_iter, residual })
}

/// Discrepancy between `U_t^* a(x,tD) U_t` (fine grid of period `tL`) and the canonical
/// quantization of `a(tx, ξ)` on the coarse grid of period `L`.
pub fn rescaling_check(a: &Symbol, t: f64, fine: &GridSpec, coarse: &GridSpec) -> Result<f64> {
    let k = -t.log2();
    if !(t > 0.0 && t <= 1.0 && (k - k.round()).abs() < 1e-12) {
        return Err(LabError::Config(format!("rescaling needs a dyadic t, got {t}")));
    }
    if fine.n != coarse.n || (fine.period - t * coarse.period).abs() > 1e-12 * coarse.period {
        return Err(LabError::Config("fine grid must have n nodes and period t·L".into()));
    }
    // U_t maps node k to node k with factor t^{-1/2}; conjugation by it is the identity on matrices.
    let lhs = quantize_semiclassical(a, t, fine).matrix;
    let rhs = quantize_canonical(&a.rescaled_space(t), coarse).matrix;
    let diff = lhs - rhs;
    if coarse.n <= SVD_MAX_N {
        Ok(largest_singular_value(&diff))
    } else {
        power_iteration(&diff, POWER_TOL, POWER_MAX_ITER).map(|r| r.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speed_profiles::{make_symbol_d, SpeedProfile, SymbolLabel};

    #[test]
    fn unit_symbol_is_identity() {
        let g = GridSpec::new(32, 1.0).unwrap();
        let one = Symbol::multiplier(0.0, SymbolLabel::Custom("one".into()), |_| Complex64::new(1.0, 0.0));
        let a = quantize_canonical(&one, &g);
        assert!((a.matrix - CMatrix::identity(32, 32)).camax() < 1e-14);
    }

    #[test]
    fn multiplier_on_mode() {
        let g = GridSpec::new(64, 2.0).unwrap();
        let abs = Symbol::multiplier(1.0, SymbolLabel::Custom("abs".into()), |x| Complex64::new(x.abs(), 0.0));
        let a = quantize_canonical(&abs, &g);
        let m = -7;
        let xi = m as f64 / 2.0;
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * xi * x));
        let out = a.apply(&f).unwrap();
        for (o, v) in out.values.iter().zip(&f.values) {
            assert!((o - v * xi.abs()).norm() < 1e-12);
        }
    }

    #[test]
    fn x_only_symbol_is_pointwise() {
        let g = GridSpec::new(32, 1.0).unwrap();
        let s = Symbol::real(0.0, SymbolLabel::Custom("x".into()), |x, _| 1.0 + x * x);
        let a = quantize_canonical(&s, &g);
        for k in 0..32 {
            for l in 0..32 {
                let want = if k == l { 1.0 + g.x(k) * g.x(k) } else { 0.0 };
                assert!((a.matrix[(k, l)] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn matrix_and_direct_routes_agree() {
        let g = GridSpec::new(64, 1.0).unwrap();
        let c = SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15);
        let d = make_symbol_d(&c, &g).unwrap();
        let f = GridFunction::from_real(g, |x| (-(30.0 * (x - 0.4)).powi(2)).exp());
        let a = quantize_semiclassical(&d, 0.3, &g).apply(&f).unwrap();
        let b = apply_symbol(&d, 0.3, &f);
        let err: f64 = a.values.iter().zip(&b.values).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn multiplier_norm_is_sup() {
        let g = GridSpec::new(64, 1.0).unwrap();
        let s = Symbol::multiplier(0.0, SymbolLabel::Custom("m".into()), |x| Complex64::new(1.0 / (1.0 + x * x), 0.0));
        let a = quantize_canonical(&s, &g);
        assert!((a.operator_norm(0.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.fourier_offdiag_ratio() < 1e-12);
        let id = QuantizedOperator::identity(&g);
        assert!((id.operator_norm(1.5, 1.5, 0.2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn export_round_trip() {
        let g = GridSpec::new(16, 1.0).unwrap();
        let c = SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15);
        let a = quantize_semiclassical(&make_symbol_d(&c, &g).unwrap(), 0.5, &g);
        let dir = std::env::temp_dir().join(format!("sclab-export-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("d.bin");
        a.export(&path).unwrap();
        let b = QuantizedOperator::import(&path).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(b.mode, QuantizationMode::Semiclassical { t: 0.5 });
        std::fs::remove_dir_all(&dir).ok();
    }
}
