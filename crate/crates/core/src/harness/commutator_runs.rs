use super::output::{gnuplot_lines, gnuplot_loglog, Cell, Table};
use super::{ExperimentConfig, Recorder};
use crate::commutators::{dagger_weight, localized_commutator, semicommutator, CommutatorSpec, Window};
use crate::error::Result;
use crate::fit::{geometric_fit, power_law_fit};
use crate::quantize::{quantize_semiclassical, CMatrix, QuantizedOperator};
use crate::speed_profiles::{check_admissible, make_symbol_d, make_symbol_p, make_symbol_p_inv};

fn push_norm(table: &mut Table, t: f64, norm: f64, from: f64, to: f64) {
    table.push(vec![t.into(), norm.into(), from.into(), to.into(), (norm / t).into()]);
}

pub(crate) fn commutator_scaling(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = &cfg.tolerances;
    let m1 = cfg.speed.m1();
    let pinv = make_symbol_p_inv(&cfg.speed, &grid)?;
    let d = make_symbol_d(&cfg.speed, &grid)?;
    let cols = ["t", "measured_norm", "space_from", "space_to", "norm_over_t"];
    let mut full = Table::new(&cols);
    let mut low = Table::new(&cols);
    let (mut ys, mut ts_low, mut ys_low) = (Vec::new(), Vec::new(), Vec::new());
    for &t in &cfg.t_sweep {
        let spec = CommutatorSpec::new(pinv.clone(), d.clone(), t);
        let y = semicommutator(&spec, &grid).operator_norm(-m1, 0.0, t)?;
        let y_low = localized_commutator(&spec.localized(Window::dyadic(-1)), &grid)?.operator_norm(-m1, 0.0, t)?;
        push_norm(&mut full, t, y, -m1, 0.0);
        push_norm(&mut low, t, y_low, -m1, 0.0);
        rec.log(format!("t = {t}: full {y:.6e}, lowest window {y_low:.6e}"));
        ys.push(y);
        // φ_{-1}(tλ) must cover the first x-harmonic λ = 1/L for the window to see the symbol.
        if t * grid.dxi() <= 0.5 {
            ts_low.push(t);
            ys_low.push(y_low);
        } else {
            rec.log(format!("t = {t}: lowest window misses the first x-harmonic; left out of its fit"));
        }
    }
    rec.table("commutator.csv", &full)?;
    rec.table("commutator_low.csv", &low)?;
    rec.text(
        "plot.gp",
        &gnuplot_loglog(
            "commutator norm vs t",
            &[("commutator.csv", 1, 2, "full"), ("commutator_low.csv", 1, 2, "lowest window")],
        ),
    )?;
    let fit = power_law_fit(&cfg.t_sweep, &ys);
    let fit_low = power_law_fit(&ts_low, &ys_low);
    rec.fit("commutator", fit);
    rec.fit("commutator_low", fit_low);
    rec.value("slope", fit.slope);
    rec.value("r2", fit.r2);
    rec.value("slope_low", fit_low.slope);
    rec.value("r2_low", fit_low.r2);
    rec.check(
        "slope",
        th.slope_ok(fit.slope, fit.r2),
        fit.slope,
        th.slope_lo,
        format!("in [{}, {}] with r2 {:.5} >= {}", th.slope_lo, th.slope_hi, fit.r2, th.r2_min),
    );
    rec.check(
        "slope_low",
        th.slope_ok(fit_low.slope, fit_low.r2),
        fit_low.slope,
        th.slope_lo,
        format!("in [{}, {}] with r2 {:.5} >= {}", th.slope_lo, th.slope_hi, fit_low.r2, th.r2_min),
    );
    Ok(())
}

pub(crate) fn dyadic_decay(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = &cfg.tolerances;
    let t = cfg.params.t.or(cfg.t_sweep.first().copied()).unwrap_or(2f64.powi(-6));
    let adm = check_admissible(&cfg.speed, &grid)?;
    let big_n = adm.n_supported as f64;
    let m1 = cfg.speed.m1();
    rec.value("n_supported", big_n);
    rec.value("m1", m1);

    let pinv = make_symbol_p_inv(&cfg.speed, &grid)?;
    let dd = dagger_weight(&make_symbol_d(&cfg.speed, &grid)?, m1);
    let spec = CommutatorSpec::new(pinv, dd, t);
    let full = semicommutator(&spec, &grid);
    let mut sum = CMatrix::zeros(grid.n, grid.n);
    let mut table = Table::new(&[
        "j",
        "measured_norm",
        "space_from",
        "space_to",
        "support_lo",
        "support_hi",
        "distance_to_origin",
        "hull_length",
    ]);
    let (mut js, mut ys) = (Vec::new(), Vec::new());
    let mut j = -1;
    loop {
        let w = Window::dyadic(j);
        if !w.is_active(t, &grid) {
            rec.log(format!("window {j} lies beyond the grid band at t = {t}; skipped"));
            break;
        }
        let op = localized_commutator(&spec.clone().localized(w.clone()), &grid)?;
        let y = op.operator_norm(0.0, 0.0, t)?;
        sum += &op.matrix;
        table.push(vec![
            j.into(),
            y.into(),
            0.0.into(),
            0.0.into(),
            w.support.0.into(),
            w.support.1.into(),
            w.distance_to_origin().into(),
            w.hull_length().into(),
        ]);
        if j >= 0 && y > 0.0 {
            js.push(j as f64);
            ys.push(y);
        }
        j += 1;
    }
    rec.table("dyadic.csv", &table)?;
    rec.text("plot.gp", &gnuplot_lines("localized commutator norm vs j", true, &[("dyadic.csv", 1, 2, "norm")]))?;

    let diff = QuantizedOperator { matrix: sum - &full.matrix, ..full.clone() };
    let recon = diff.operator_norm(0.0, 0.0, t)? / full.operator_norm(0.0, 0.0, t)?;
    let fit = geometric_fit(&js, &ys);
    let rate = -fit.slope;
    let threshold = (big_n - 1.5 - m1) - th.decay_margin;
    rec.fit("dyadic", fit);
    rec.value("decay_rate", rate);
    rec.value("decay_threshold", threshold);
    rec.value("reconstruction_error", recon);
    rec.check(
        "decay_rate",
        rate >= threshold,
        rate,
        threshold,
        format!("log2 decay per window, N = {big_n}, m1 = {m1:.4}, {} windows", js.len()),
    );
    rec.check("reconstruction", recon <= th.reconstruction_tol, recon, th.reconstruction_tol, "relative norm of the sum minus the full commutator");
    Ok(())
}

pub(crate) fn coercivity(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = &cfg.tolerances;
    let m1 = cfg.speed.m1();
    let p = make_symbol_p(&cfg.speed, &grid)?;
    let pinv = make_symbol_p_inv(&cfg.speed, &grid)?;
    let mut table = Table::new(&["t", "measured_norm", "sigma_min", "space_from", "space_to"]);
    let (mut ys, mut sig) = (Vec::new(), Vec::new());
    for &t in &cfg.t_sweep {
        let c = semicommutator(&CommutatorSpec::new(p.clone(), pinv.clone(), t), &grid);
        let y = c.operator_norm(-m1, -m1, t)?;
        let s = quantize_semiclassical(&pinv, t, &grid).smallest_singular_value(-m1, 0.0, t);
        rec.log(format!("t = {t}: commutator {y:.6e}, sigma_min {s:.6e}"));
        table.push(vec![t.into(), y.into(), s.into(), (-m1).into(), (-m1).into()]);
        ys.push(y);
        sig.push(s);
    }
    rec.table("coercivity.csv", &table)?;
    rec.text(
        "plot.gp",
        &gnuplot_loglog("c_t(p, p^-1) and sigma_min", &[("coercivity.csv", 1, 2, "norm"), ("coercivity.csv", 1, 3, "sigma_min")]),
    )?;
    let fit = power_law_fit(&cfg.t_sweep, &ys);
    rec.fit("coercivity", fit);
    let small: f64 = cfg
        .t_sweep
        .iter()
        .zip(&ys)
        .filter(|(t, _)| **t <= th.coercivity_t_max * (1.0 + 1e-12))
        .map(|(_, y)| *y)
        .fold(0.0, f64::max);
    let (smin, smax) = sig.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    let spread = smax / smin;
    let threshold_t = cfg.t_sweep.iter().zip(&ys).find(|(_, y)| **y >= 1.0).map(|(t, _)| *t);
    match threshold_t {
        Some(t) => rec.log(format!("commutator norm reaches 1 at t = {t}")),
        None => rec.log("commutator norm stays below 1 on the sweep"),
    }
    rec.value("max_norm_small_t", small);
    rec.value("slope", fit.slope);
    rec.value("r2", fit.r2);
    rec.value("sigma_min", smin);
    rec.value("sigma_spread", spread);
    rec.value("norm_reaches_one_at", threshold_t.unwrap_or(f64::NAN));
    rec.check(
        "norm_small_t",
        small <= th.coercivity_norm_max,
        small,
        th.coercivity_norm_max,
        format!("max over t <= {}", th.coercivity_t_max),
    );
    rec.check(
        "slope",
        th.slope_ok(fit.slope, fit.r2),
        fit.slope,
        th.slope_lo,
        format!("in [{}, {}] with r2 {:.5} >= {}", th.slope_lo, th.slope_hi, fit.r2, th.r2_min),
    );
    rec.check("sigma_spread", smin > 0.0 && spread < th.sigma_spread_max, spread, th.sigma_spread_max, "max/min of sigma_min");
    Ok(())
}

pub(crate) fn boundedness(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = &cfg.tolerances;
    let (m1, m2) = (cfg.speed.m1(), cfg.speed.m2());
    let symbols = [
        ("p", make_symbol_p(&cfg.speed, &grid)?, m1),
        ("p_inv", make_symbol_p_inv(&cfg.speed, &grid)?, -m2),
        ("d", make_symbol_d(&cfg.speed, &grid)?, 0.0),
    ];
    let mut table = Table::new(&["t", "symbol", "measured_norm", "space_from", "space_to"]);
    for (name, sym, order) in &symbols {
        let mut ys = Vec::new();
        for &t in &cfg.t_sweep {
            let y = quantize_semiclassical(sym, t, &grid).operator_norm(*order, 0.0, t)?;
            table.push(vec![t.into(), Cell::from(*name), y.into(), (*order).into(), 0.0.into()]);
            ys.push(y);
        }
        let hi = ys.iter().copied().fold(0.0f64, f64::max);
        let growth = hi / ys[ys.len() - 1];
        rec.value(&format!("max_norm_{name}"), hi);
        rec.value(&format!("growth_{name}"), growth);
        rec.check(
            &format!("uniform_{name}"),
            hi.is_finite() && growth < th.boundedness_growth,
            growth,
            th.boundedness_growth,
            format!("max over the sweep of the H^{order:.4}_t -> L2 norm, relative to the largest t"),
        );
    }
    rec.table("boundedness.csv", &table)?;
    Ok(())
}
