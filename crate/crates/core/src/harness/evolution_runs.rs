use super::output::{gnuplot_lines, Table};
use super::{ExperimentConfig, Recorder};
use crate::error::{LabError, Result};
use crate::evolution::{gronwall_rate, solve, InitialData, IvpConfig, Stepper, Trajectory};
use crate::grid::GridSpec;
use crate::speed_profiles::check_admissible;

fn relative_deviation(traj: &Trajectory, e0: f64, window: (f64, f64)) -> f64 {
    traj.times
        .iter()
        .zip(&traj.energies)
        .filter(|(t, _)| **t >= window.0 - 1e-12 && **t <= window.1 + 1e-12)
        .filter_map(|(_, e)| e.map(|v| (v - e0).abs() / e0))
        .fold(0.0, f64::max)
}

/// `count` equispaced outputs on `[lo, hi]`.
pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    (0..count).map(|k| if k + 1 == count { hi } else { lo + (hi - lo) * k as f64 / (count - 1) as f64 }).collect()
}

pub(crate) fn oracle(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    if !cfg.speed.is_constant() {
        return Err(LabError::Config("oracle needs a constant speed".into()));
    }
    let th = &cfg.tolerances;
    let t_final = cfg.params.t_final.unwrap_or(1.0);
    let data = cfg
        .params
        .initial_data
        .clone()
        .unwrap_or(InitialData::Gaussian { center: 0.5 * grid.period, width: grid.period / 16.0 });
    let mut ivp = IvpConfig {
        grid,
        speed: cfg.speed.clone(),
        t_final,
        stepper: Stepper::Rk4,
        theta: cfg.params.theta.unwrap_or(0.1),
        initial_data: data,
        output_times: IvpConfig::uniform_outputs(t_final, cfg.params.output_count.unwrap_or(10)),
    };
    let rk = solve(&ivp)?;
    let rk_seconds = rec.elapsed();
    ivp.stepper = Stepper::ExactConstantC;
    let exact = solve(&ivp)?;

    let e0 = rk.states[0].l2_norm().powi(2);
    let mut table = Table::new(&["time", "rk4_l2", "exact_l2", "rel_error", "rk4_energy", "exact_energy"]);
    let mut final_err = 0.0;
    for i in 0..rk.times.len() {
        let diff = rk.states[i].axpy((-1.0).into(), &exact.states[i]).l2_norm();
        let rel = diff / exact.states[i].l2_norm();
        final_err = rel;
        table.push(vec![
            rk.times[i].into(),
            rk.states[i].l2_norm().into(),
            exact.states[i].l2_norm().into(),
            rel.into(),
            rk.energies[i].unwrap_or(e0).into(),
            exact.energies[i].unwrap_or(e0).into(),
        ]);
    }
    rec.table("trajectory.csv", &table)?;
    rec.text(
        "plot.gp",
        &gnuplot_lines("weighted energy", false, &[("trajectory.csv", 1, 5, "rk4"), ("trajectory.csv", 1, 6, "exact")]),
    )?;
    if let Some(dir) = rec.dir() {
        rk.write_csv(&dir.join("rk4_trajectory.csv"))?;
    }

    let dev_exact = relative_deviation(&exact, e0, th.conservation_window);
    let dev_rk = relative_deviation(&rk, e0, th.conservation_window);
    rec.value("rel_error_final", final_err);
    rec.value("rk4_seconds", rk_seconds);
    rec.value("conservation_exact", dev_exact);
    rec.value("conservation_rk4", dev_rk);
    rec.check("rk4_vs_exact", final_err <= th.oracle_rel_error, final_err, th.oracle_rel_error, format!("at t = {t_final}"));
    rec.check("rk4_runtime", rk_seconds < th.oracle_runtime_s, rk_seconds, th.oracle_runtime_s, "seconds");
    rec.check(
        "conservation_exact",
        dev_exact <= th.conservation_exact,
        dev_exact,
        th.conservation_exact,
        "max |E(t) - E(0)|/E(0)",
    );
    rec.check(
        "conservation_rk4",
        dev_rk <= th.conservation_stepper,
        dev_rk,
        th.conservation_stepper,
        "max |E(t) - E(0)|/E(0)",
    );
    Ok(())
}

struct RateRun {
    label: &'static str,
    n: usize,
    theta: f64,
    max_rate: f64,
}

pub(crate) fn theorem1(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = &cfg.tolerances;
    let report = check_admissible(&cfg.speed, &grid)?;
    rec.value("n_supported", report.n_supported as f64);
    rec.value("n_required", report.n_required as f64);
    rec.log(format!("regularity verdict {:?}", report.verdict));

    let t_final = cfg.params.t_final.unwrap_or(0.5);
    let theta = cfg.params.theta.unwrap_or(0.1);
    let outputs = linspace(0.1 * t_final, t_final, cfg.params.output_count.unwrap_or(46));
    let base_data = cfg
        .params
        .initial_data
        .clone()
        .unwrap_or(InitialData::Gaussian { center: 0.5 * grid.period, width: 0.1 * grid.period });
    let data_for_seed = |seed: u64| match &base_data {
        InitialData::Noise { band, .. } => InitialData::Noise { seed, band: *band },
        other => other.clone(),
    };
    let seeds: Vec<u64> = if matches!(base_data, InitialData::Noise { .. }) { cfg.seeds.clone() } else { vec![cfg.seeds[0]] };

    let mut energy = Table::new(&["run", "n", "theta", "seed", "time", "l2_norm", "energy"]);
    let mut rates = Table::new(&["run", "n", "theta", "seed", "time", "rate"]);
    let mut runs = vec![
        RateRun { label: "base", n: grid.n, theta, max_rate: f64::NEG_INFINITY },
        RateRun { label: "refined_n", n: 2 * grid.n, theta, max_rate: f64::NEG_INFINITY },
        RateRun { label: "half_dt", n: grid.n, theta: 0.5 * theta, max_rate: f64::NEG_INFINITY },
    ];
    let mut max_abs = 0.0f64;
    for run in &mut runs {
        let g = GridSpec::new(run.n, grid.period)?;
        for &seed in &seeds {
            let ivp = IvpConfig {
                grid: g,
                speed: cfg.speed.clone(),
                t_final,
                stepper: Stepper::Rk4,
                theta: run.theta,
                initial_data: data_for_seed(seed),
                output_times: outputs.clone(),
            };
            let traj = solve(&ivp)?;
            for i in 1..traj.times.len() {
                energy.push(vec![
                    run.label.into(),
                    run.n.into(),
                    run.theta.into(),
                    (seed as i64).into(),
                    traj.times[i].into(),
                    traj.states[i].l2_norm().into(),
                    traj.energies[i].unwrap_or(f64::NAN).into(),
                ]);
            }
            let r = gronwall_rate(&traj)?;
            for (t, v) in r.times.iter().zip(&r.rates) {
                rates.push(vec![
                    run.label.into(),
                    run.n.into(),
                    run.theta.into(),
                    (seed as i64).into(),
                    (*t).into(),
                    (*v).into(),
                ]);
                max_abs = max_abs.max(v.abs());
            }
            run.max_rate = run.max_rate.max(r.max_over(0.1 * t_final, t_final));
        }
        rec.log(format!("{}: n = {}, theta = {}, max rate {:.6e}", run.label, run.n, run.theta, run.max_rate));
        rec.value(&format!("max_rate_{}", run.label), run.max_rate);
    }
    rec.table("energy.csv", &energy)?;
    rec.table("rates.csv", &rates)?;
    rec.text("plot.gp", &gnuplot_lines("d/dt log E", false, &[("rates.csv", 5, 6, "all runs")]))?;

    let seconds = rec.elapsed();
    rec.value("max_abs_rate", max_abs);
    if cfg.speed.is_constant() {
        rec.check("constant_speed_rate", max_abs < th.constant_rate_abs, max_abs, th.constant_rate_abs, "max |rate|");
    } else {
        let base = runs[0].max_rate;
        let finite = runs.iter().all(|r| r.max_rate.is_finite());
        rec.check("max_rate_finite", finite, base, f64::INFINITY, "base run");
        for r in &runs[1..] {
            let change = (r.max_rate - base).abs() / base.abs();
            rec.value(&format!("rate_change_{}", r.label), change);
            rec.check(
                &format!("rate_stable_{}", r.label),
                change < th.rate_stability,
                change,
                th.rate_stability,
                format!("relative change of max rate, {} vs base", r.label),
            );
        }
    }
    rec.check("runtime", seconds < th.theorem1_runtime_s, seconds, th.theorem1_runtime_s, "seconds");
    Ok(())
}
