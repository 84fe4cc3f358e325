//! The model problem `∂_t f = d_t(x,D) f`, `f(0) = f0`, with `d_t = |ξ|/(1 + c(x)t|ξ|)`.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{apply_multiplier, inverse_transform, GridFunction, GridSpec, SpectrumFunction};
use crate::quantize::apply_rowwise;
use crate::speed_profiles::SpeedProfile;

/// Abort once `‖f‖` exceeds this multiple of `‖f0‖`.
pub const BLOW_UP_FACTOR: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    Rk4,
    ExactConstantC,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum InitialData {
    /// `exp(−π((x − center)/width)²)`.
    Gaussian { center: f64, width: f64 },
    /// `exp(2πiξ0 x) exp(−π(x − center)²/σ²)`.
    WavePacket { xi0: f64, center: f64, sigma: f64 },
    /// Random complex Fourier coefficients on `|m| ≤ band`, fixed seed.
    Noise { seed: u64, band: usize },
    /// `exp(2πi m x / L)`.
    Mode { m: i64 },
    /// Real samples on the grid nodes.
    Samples { values: Vec<f64> },
}

impl InitialData {
    pub fn sample(&self, grid: &GridSpec) -> Result<GridFunction> {
        Ok(match self {
            InitialData::Gaussian { center, width } => {
                GridFunction::from_real(*grid, |x| (-PI * ((x - center) / width).powi(2)).exp())
            }
            InitialData::WavePacket { xi0, center, sigma } => wave_packet(grid, *xi0, *center, *sigma),
            InitialData::Noise { seed, band } => band_limited_noise(grid, *seed, *band),
            InitialData::Mode { m } => {
                let xi = *m as f64 / grid.period;
                GridFunction::from_fn(*grid, |x| Complex64::from_polar(1.0, 2.0 * PI * xi * x))
            }
            InitialData::Samples { values } => {
                GridFunction::new(*grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())?
            }
        })
    }
}

/// Packet centered at `center` on the circle, so the envelope wraps with the grid.
pub fn wave_packet(grid: &GridSpec, xi0: f64, center: f64, sigma: f64) -> GridFunction {
    let l = grid.period;
    GridFunction::from_fn(*grid, |x| {
        let r = crate::grid::wrapped_offset(x, center, l);
        Complex64::from_polar((-PI * r * r / (sigma * sigma)).exp(), 2.0 * PI * xi0 * x)
    })
}

pub fn band_limited_noise(grid: &GridSpec, seed: u64, band: usize) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..grid.n)
        .map(|j| {
            let (re, im) = (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            if grid.freq_index(j).unsigned_abs() as usize <= band {
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    inverse_transform(&SpectrumFunction { grid: *grid, coeffs })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IvpConfig {
    pub grid: GridSpec,
    pub speed: SpeedProfile,
    pub t_final: f64,
    pub stepper: Stepper,
    /// CFL safety factor `θ`.
    pub theta: f64,
    pub initial_data: InitialData,
    /// Output times in `(0, t_final]`; time 0 is always recorded.
    pub output_times: Vec<f64>,
}

impl IvpConfig {
    /// Uniform outputs `t_final·k/count`, `k = 1..count`.
    pub fn uniform_outputs(t_final: f64, count: usize) -> Vec<f64> {
        (1..=count).map(|k| t_final * k as f64 / count as f64).collect()
    }

    /// `θ / min(ξ_max, 1/(c_min t))`.
    pub fn step_size(&self, t: f64, c_min: f64) -> f64 {
        let xm = self.grid.xi_max();
        let bound = if t > 0.0 { xm.min(1.0 / (c_min * t)) } else { xm };
        self.theta / bound
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    /// `‖p⁻¹(x,tD) f(t)‖²`, absent at `t = 0`.
    pub energies: Vec<Option<f64>>,
}

impl Trajectory {
    /// `time,l2_norm,energy` rows with fixed formatting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,l2_norm,energy\n");
        for (i, t) in self.times.iter().enumerate() {
            let e = self.energies[i].map(|v| format!("{v:.16e}")).unwrap_or_default();
            s.push_str(&format!("{t:.16e},{:.16e},{e}\n", self.states[i].l2_norm()));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::File::create(path)?.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn final_state(&self) -> &GridFunction {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// `d_t(x,D) f` without assembling the matrix.
pub fn apply_d_t(c_nodes: &[f64], t: f64, f: &GridFunction) -> GridFunction {
    apply_rowwise(f, |k, xi| {
        let a = xi.abs();
        Complex64::new(a / (1.0 + c_nodes[k] * t * a), 0.0)
    })
}

/// `p⁻¹(x,tD) f` without assembling the matrix.
pub fn apply_p_inv(c_nodes: &[f64], t: f64, f: &GridFunction) -> GridFunction {
    apply_rowwise(f, |k, xi| {
        let c = c_nodes[k];
        Complex64::new((-(c * t * xi.abs()).ln_1p() / c).exp(), 0.0)
    })
}

/// `(1 + c t|ξ|)^{1/c} f̂0` synthesized back to the grid.
pub fn exact_constant_c(f0: &GridFunction, c: f64, t: f64) -> Result<GridFunction> {
    if !(c > 0.0) {
        return Err(LabError::Config(format!("constant speed {c} must be positive")));
    }
    Ok(apply_multiplier(f0, |xi| Complex64::new(((c * t * xi.abs()).ln_1p() / c).exp(), 0.0)))
}

/// `‖p⁻¹(x,tD) f‖²`.
pub fn energy(f: &GridFunction, speed: &SpeedProfile, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(LabError::Config("energy is defined for t > 0".into()));
    }
    let c = speed.sample(&f.grid);
    Ok(apply_p_inv(&c, t, f).l2_norm().powi(2))
}

fn rk4_step(c: &[f64], t: f64, dt: f64, f: &GridFunction) -> GridFunction {
    let h = Complex64::new(dt, 0.0);
    let half = Complex64::new(0.5 * dt, 0.0);
    let k1 = apply_d_t(c, t, f);
    let k2 = apply_d_t(c, t + 0.5 * dt, &f.axpy(half, &k1));
    let k3 = apply_d_t(c, t + 0.5 * dt, &f.axpy(half, &k2));
    let k4 = apply_d_t(c, t + dt, &f.axpy(h, &k3));
    let values = (0..f.values.len())
        .map(|i| f.values[i] + h / 6.0 * (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i]))
        .collect();
    GridFunction { grid: f.grid, values }
}

pub fn solve(config: &IvpConfig) -> Result<Trajectory> {
    config.speed.check_nodes(&config.grid)?;
    if !(config.t_final > 0.0 && config.t_final <= 1.0) {
        return Err(LabError::Config(format!("t_final = {} must lie in (0, 1]", config.t_final)));
    }
    if !(config.theta > 0.0 && config.theta <= 1.0) {
        return Err(LabError::Config(format!("theta = {} must lie in (0, 1]", config.theta)));
    }
    let mut outs = config.output_times.clone();
    if outs.iter().any(|&t| !(t > 0.0 && t <= config.t_final)) || outs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::Config("output times must increase within (0, t_final]".into()));
    }
    if outs.last() != Some(&config.t_final) {
        outs.push(config.t_final);
    }
    let f0 = config.initial_data.sample(&config.grid)?;
    let c = config.speed.sample(&config.grid);
    let mut traj = Trajectory { times: vec![0.0], states: vec![f0.clone()], energies: vec![None] };
    let record = |traj: &mut Trajectory, t: f64, f: GridFunction| {
        let e = apply_p_inv(&c, t, &f).l2_norm().powi(2);
        traj.times.push(t);
        traj.states.push(f);
        traj.energies.push(Some(e));
    };

    match config.stepper {
        Stepper::ExactConstantC => {
            if !config.speed.is_constant() {
                return Err(LabError::Config("exact propagator needs a constant speed".into()));
            }
            for &t in &outs {
                let f = exact_constant_c(&f0, config.speed.c0, t)?;
                record(&mut traj, t, f);
            }
        }
        Stepper::Rk4 => {
            let c_min = c.iter().copied().fold(f64::INFINITY, f64::min);
            let guard = BLOW_UP_FACTOR * f0.l2_norm().max(f64::MIN_POSITIVE);
            let mut t = 0.0;
            let mut f = f0.clone();
            for &target in &outs {
                while t < target {
                    let mut dt = config.step_size(t, c_min);
                    // Land exactly on outputs; absorb slivers into the last step.
                    if t + dt >= target || target - (t + dt) < 1e-3 * dt {
                        dt = target - t;
                    }
                    f = rk4_step(&c, t, dt, &f);
                    t = if target - (t + dt) <= 0.0 { target } else { t + dt };
                    let norm = f.l2_norm();
                    if !norm.is_finite() || norm > guard {
                        return Err(LabError::BlowUp { time: t, norm });
                    }
                }
                record(&mut traj, target, f.clone());
            }
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GronwallRates {
    pub times: Vec<f64>,
    pub rates: Vec<f64>,
    pub max: f64,
}

impl GronwallRates {
    /// Largest rate among interior samples with time in `[lo, hi]`.
    pub fn max_over(&self, lo: f64, hi: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.rates)
            .filter(|(t, _)| **t >= lo - 1e-12 && **t <= hi + 1e-12)
            .map(|(_, r)| *r)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Centered differences of `log E(t)` at interior samples.
pub fn gronwall_rate(traj: &Trajectory) -> Result<GronwallRates> {
    let pts: Vec<(f64, f64)> =
        traj.times.iter().zip(&traj.energies).filter_map(|(t, e)| e.map(|v| (*t, v.ln()))).collect();
    if pts.len() < 3 {
        return Err(LabError::Numerical(format!("need at least 3 energy samples, have {}", pts.len())));
    }
    let mut times = Vec::new();
    let mut rates = Vec::new();
    for w in pts.windows(3) {
        times.push(w[1].0);
        rates.push((w[2].1 - w[0].1) / (w[2].0 - w[0].0));
    }
    let max = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GronwallRates { times, rates, max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(stepper: Stepper, speed: SpeedProfile, data: InitialData) -> IvpConfig {
        IvpConfig {
            grid: GridSpec::new(64, 4.0).unwrap(),
            speed,
            t_final: 0.5,
            stepper,
            theta: 0.1,
            initial_data: data,
            output_times: IvpConfig::uniform_outputs(0.5, 5),
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let c = cfg(Stepper::Rk4, SpeedProfile::constant(1.0, 0.9, 1.1), InitialData::Samples { values: vec![0.0; 64] });
        let tr = solve(&c).unwrap();
        assert!(tr.states.iter().all(|s| s.l2_norm() == 0.0));
    }

    #[test]
    fn single_mode_grows_by_multiplier() {
        let c = cfg(Stepper::Rk4, SpeedProfile::constant(1.0, 0.9, 1.1), InitialData::Mode { m: 3 });
        let tr = solve(&c).unwrap();
        let xi = 3.0 / 4.0;
        let want = (1.0 + 0.5 * xi) * tr.states[0].l2_norm();
        assert!((tr.final_state().l2_norm() - want).abs() < 1e-9 * want);
    }

    #[test]
    fn exact_propagator_trivia() {
        let g = GridSpec::new(32, 1.0).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * 2.0 * x));
        assert_eq!(exact_constant_c(&f, 1.0, 0.0).unwrap().values, apply_multiplier(&f, |_| 1.0.into()).values);
        let out = exact_constant_c(&f, 1.0, 1.0).unwrap();
        assert!((out.l2_norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rates_need_three_samples() {
        let g = GridSpec::new(16, 1.0).unwrap();
        let tr = Trajectory {
            times: vec![0.0, 0.1],
            states: vec![GridFunction::zeros(g); 2],
            energies: vec![None, Some(1.0)],
        };
        assert!(gronwall_rate(&tr).is_err());
    }

    #[test]
    fn exact_stepper_rejects_variable_speed() {
        let c = cfg(Stepper::ExactConstantC, SpeedProfile::cosine(1.0, 0.05, 0.25, 0.9, 1.1), InitialData::Mode { m: 1 });
        assert!(solve(&c).is_err());
    }
}
