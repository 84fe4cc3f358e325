//! Configuration-driven experiment runner.

mod commutator_runs;
mod evolution_runs;
mod identity_runs;
mod local_runs;
pub mod output;
pub mod thresholds;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::evolution::InitialData;
use crate::fit::LinearFit;
use crate::grid::GridSpec;
use crate::speed_profiles::SpeedProfile;
use output::{digest, Table};
pub use thresholds::Thresholds;

pub use local_runs::LocalProbe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    Oracle,
    Theorem1,
    Theorem2,
    CommutatorScaling,
    DyadicDecay,
    Coercivity,
    Boundedness,
    SeminormScaling,
    GammaIdentity,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 9] = [
        ExperimentName::Oracle,
        ExperimentName::Theorem1,
        ExperimentName::Theorem2,
        ExperimentName::CommutatorScaling,
        ExperimentName::DyadicDecay,
        ExperimentName::Coercivity,
        ExperimentName::Boundedness,
        ExperimentName::SeminormScaling,
        ExperimentName::GammaIdentity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Oracle => "oracle",
            ExperimentName::Theorem1 => "theorem1",
            ExperimentName::Theorem2 => "theorem2",
            ExperimentName::CommutatorScaling => "commutator_scaling",
            ExperimentName::DyadicDecay => "dyadic_decay",
            ExperimentName::Coercivity => "coercivity",
            ExperimentName::Boundedness => "boundedness",
            ExperimentName::SeminormScaling => "seminorm_scaling",
            ExperimentName::GammaIdentity => "gamma_identity",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExperimentName::Oracle => "RK4 against the constant-speed propagator; energy conservation",
            ExperimentName::Theorem1 => "growth rate of the weighted energy under grid and step refinement",
            ExperimentName::Theorem2 => "local smoothing exponent and two-sided bounds near a bump",
            ExperimentName::CommutatorScaling => "O(t) law for the semicommutator of p^-1 and d",
            ExperimentName::DyadicDecay => "geometric decay of dyadically localized commutators",
            ExperimentName::Coercivity => "size of c_t(p, p^-1) and the lower bound of p^-1(x,tD)",
            ExperimentName::Boundedness => "uniform-in-t operator norms of p, p^-1 and d",
            ExperimentName::SeminormScaling => "symbol seminorms of p(x, t.) as t shrinks",
            ExperimentName::GammaIdentity => "exact discrete identities",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub n: usize,
    pub period: f64,
}

/// Smooth cutoff `χ_ε` centered at `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub center: f64,
    pub radius: f64,
}

/// Knobs that only some experiments read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentParams {
    pub t_final: Option<f64>,
    pub theta: Option<f64>,
    pub output_count: Option<usize>,
    pub initial_data: Option<InitialData>,
    /// Semiclassical parameter for single-`t` experiments.
    pub t: Option<f64>,
    pub bump: Option<BumpParams>,
    /// Probe frequencies `u = tξ0`.
    pub probes: Option<Vec<f64>>,
    /// Probes with `u` at or above this value enter the exponent fit.
    pub exponent_fit_min_u: Option<f64>,
    /// `(j, k)` pairs for seminorm estimates.
    pub seminorm_indices: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub grid: GridParams,
    #[serde(default = "default_speed")]
    pub speed: SpeedProfile,
    #[serde(default)]
    pub t_sweep: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub tolerances: Thresholds,
    /// Relative to the `--out` directory; defaults to the experiment name.
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub params: ExperimentParams,
}

fn default_speed() -> SpeedProfile {
    SpeedProfile::constant(1.0, 0.85, 1.15)
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

/// A config file holds either one experiment or a batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Batch { experiments: Vec<ExperimentConfig> },
    Single(ExperimentConfig),
}

impl ConfigFile {
    pub fn into_vec(self) -> Vec<ExperimentConfig> {
        match self {
            ConfigFile::Batch { experiments } => experiments,
            ConfigFile::Single(c) => vec![c],
        }
    }
}

/// Reads a config file and resolves tabulated profiles relative to it.
pub fn load_config(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: ConfigFile = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut cfgs = file.into_vec();
    for c in &mut cfgs {
        c.speed.resolve(base)?;
    }
    Ok(cfgs)
}

impl ExperimentConfig {
    pub fn new(name: ExperimentName, n: usize, period: f64, speed: SpeedProfile) -> Self {
        Self {
            name,
            grid: GridParams { n, period },
            speed,
            t_sweep: Vec::new(),
            seeds: default_seeds(),
            tolerances: Thresholds::default(),
            output_dir: None,
            params: ExperimentParams::default(),
        }
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.period)
    }

    fn needs_sweep(&self) -> bool {
        matches!(
            self.name,
            ExperimentName::CommutatorScaling
                | ExperimentName::Coercivity
                | ExperimentName::Boundedness
                | ExperimentName::Theorem2
                | ExperimentName::SeminormScaling
        )
    }

    /// Cheap checks run on every config of a batch before any computation.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid_spec()?;
        self.speed.check_pair()?;
        self.speed.check_nodes(&grid)?;
        let ts = &self.t_sweep;
        if ts.iter().any(|&t| !(t > 0.0 && t <= 1.0)) || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::Config("t_sweep must increase strictly within (0, 1]".into()));
        }
        let min_points = if self.name == ExperimentName::SeminormScaling { 2 } else { 4 };
        if self.needs_sweep() && ts.len() < min_points {
            return Err(LabError::Config(format!(
                "{} needs at least {min_points} t_sweep points",
                self.name.as_str()
            )));
        }
        if self.seeds.is_empty() {
            return Err(LabError::Config("seeds must not be empty".into()));
        }
        Ok(())
    }

    /// Canonical JSON of the config, used for the inputs digest.
    pub fn canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn output_subdir(&self) -> String {
        self.output_dir.clone().unwrap_or_else(|| self.name.as_str().to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: ExperimentName,
    pub inputs_digest: String,
    /// Table file names inside the output directory.
    pub tables: Vec<String>,
    pub fits: BTreeMap<String, LinearFit>,
    /// Headline measurements keyed by name.
    pub values: BTreeMap<String, f64>,
    pub criteria: Vec<Criterion>,
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// Collects tables, fits and verdicts while an experiment runs.
pub(crate) struct Recorder {
    name: ExperimentName,
    out: Option<PathBuf>,
    digest: String,
    tables: Vec<String>,
    pub(crate) fits: BTreeMap<String, LinearFit>,
    pub(crate) values: BTreeMap<String, f64>,
    criteria: Vec<Criterion>,
    notes: Vec<String>,
    started: Instant,
}

impl Recorder {
    fn new(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Self> {
        let out = match out {
            Some(root) => {
                let dir = root.join(cfg.output_subdir());
                std::fs::create_dir_all(&dir)?;
                Some(dir)
            }
            None => None,
        };
        let version = env!("CARGO_PKG_VERSION");
        Ok(Self {
            name: cfg.name,
            out,
            digest: digest(format!("{version}\n{}", cfg.canonical_json()?).as_bytes()),
            tables: Vec::new(),
            fits: BTreeMap::new(),
            values: BTreeMap::new(),
            criteria: Vec::new(),
            notes: Vec::new(),
            started: Instant::now(),
        })
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    pub(crate) fn log(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        eprintln!("[{}] {msg}", self.name.as_str());
        self.notes.push(msg);
    }

    pub(crate) fn table(&mut self, file: &str, table: &Table) -> Result<()> {
        if let Some(dir) = &self.out {
            table.write(&dir.join(file))?;
        }
        self.tables.push(file.to_string());
        Ok(())
    }

    pub(crate) fn text(&mut self, file: &str, body: &str) -> Result<()> {
        if let Some(dir) = &self.out {
            std::fs::write(dir.join(file), body)?;
        }
        Ok(())
    }

    pub(crate) fn dir(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    pub(crate) fn value(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }

    pub(crate) fn fit(&mut self, name: &str, f: LinearFit) {
        self.fits.insert(name.to_string(), f);
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, measured: f64, threshold: f64, detail: impl Into<String>) {
        let detail = detail.into();
        eprintln!(
            "[{}] {} {name}: measured {measured:.6e}, threshold {threshold:.6e} {detail}",
            self.name.as_str(),
            if passed { "PASS" } else { "FAIL" }
        );
        self.criteria.push(Criterion { name: name.to_string(), passed, measured, threshold, detail });
    }

    fn finish(self) -> Result<ExperimentReport> {
        let passed = self.criteria.iter().all(|c| c.passed);
        let report = ExperimentReport {
            name: self.name,
            inputs_digest: self.digest,
            tables: self.tables,
            fits: self.fits,
            values: self.values,
            criteria: self.criteria,
            notes: self.notes,
            runtime_seconds: self.started.elapsed().as_secs_f64(),
            passed,
        };
        if let Some(dir) = &self.out {
            std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        }
        Ok(report)
    }
}

/// Runs one experiment; tables go under `out/<output_dir>` when `out` is given.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg, out)?;
    match cfg.name {
        ExperimentName::Oracle => evolution_runs::oracle(cfg, &mut rec)?,
        ExperimentName::Theorem1 => evolution_runs::theorem1(cfg, &mut rec)?,
        ExperimentName::Theorem2 => local_runs::theorem2(cfg, &mut rec)?,
        ExperimentName::CommutatorScaling => commutator_runs::commutator_scaling(cfg, &mut rec)?,
        ExperimentName::DyadicDecay => commutator_runs::dyadic_decay(cfg, &mut rec)?,
        ExperimentName::Coercivity => commutator_runs::coercivity(cfg, &mut rec)?,
        ExperimentName::Boundedness => commutator_runs::boundedness(cfg, &mut rec)?,
        ExperimentName::SeminormScaling => identity_runs::seminorm_scaling(cfg, &mut rec)?,
        ExperimentName::GammaIdentity => identity_runs::gamma_identity(cfg, &mut rec)?,
    }
    rec.finish()
}

macro_rules! named_runner {
    ($($(#[$doc:meta])* $fn_name:ident => $variant:ident),* $(,)?) => {
        $(
            $(#[$doc])*
            pub fn $fn_name(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentReport> {
                run_experiment(&ExperimentConfig { name: ExperimentName::$variant, ..cfg.clone() }, out)
            }
        )*
    };
}

named_runner! {
    /// RK4 against the exact constant-speed propagator, plus energy conservation.
    run_oracle => Oracle,
    /// Growth rate of `‖p⁻¹(x,tD) f(t)‖²` and its stability under refinement.
    run_theorem1 => Theorem1,
    /// Local smoothing exponent and two-sided bounds for packets under a cutoff.
    run_theorem2 => Theorem2,
    /// `‖𝔠_t(p⁻¹, d)‖_{H^{−m1}_t → L²}` against `t`.
    run_commutator_scaling => CommutatorScaling,
    /// Norms of dyadically localized commutators against the window index.
    run_dyadic_decay => DyadicDecay,
    /// `‖𝔠_t(p, p⁻¹)‖` on `H^{−m1}_t` and the smallest singular value of `p⁻¹(x,tD)`.
    run_coercivity => Coercivity,
    /// Operator norms of `p`, `p⁻¹` and `d` between their natural spaces.
    run_boundedness => Boundedness,
    /// `M` seminorms of `p(x, t·)` along the sweep.
    run_seminorm_scaling => SeminormScaling,
    /// Exact discrete identities.
    run_gamma_identity => GammaIdentity,
}

/// Validates every config, then runs them on up to `workers` threads. Results keep input order.
pub fn run_batch(cfgs: &[ExperimentConfig], out: Option<&Path>, workers: usize) -> Result<Vec<Result<ExperimentReport>>> {
    for c in cfgs {
        c.validate().map_err(|e| prefix_error(c.name, e))?;
    }
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, cfgs.len().max(1));
    let mut slots: Vec<Option<Result<ExperimentReport>>> = (0..cfgs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::SeqCst);
                        if i >= cfgs.len() {
                            break;
                        }
                        done.push((i, run_experiment(&cfgs[i], out)));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("experiment worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    Ok(slots.into_iter().map(|s| s.expect("every slot filled")).collect())
}

fn prefix_error(name: ExperimentName, e: LabError) -> LabError {
    match e {
        LabError::Config(m) => LabError::Config(format!("{}: {m}", name.as_str())),
        LabError::Admissibility(m) => LabError::Admissibility(format!("{}: {m}", name.as_str())),
        other => other,
    }
}

/// Median of a non-empty slice.
pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Largest `|v/median − 1|`.
pub(crate) fn spread_about_median(v: &[f64]) -> f64 {
    let m = median(v);
    v.iter().map(|x| (x / m - 1.0).abs()).fold(0.0, f64::max)
}
