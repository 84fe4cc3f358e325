use serde::{Deserialize, Serialize};

use super::output::{gnuplot_loglog, Table};
use super::{spread_about_median, BumpParams, ExperimentConfig, Recorder};
use crate::error::{LabError, Result};
use crate::evolution::wave_packet;
use crate::fit::linear_fit;
use crate::grid::{wrapped_offset, GridFunction};
use crate::norms::hst_norm;
use crate::quantize::{quantize_semiclassical, QuantizationMode, QuantizedOperator};
use crate::speed_profiles::{bump_profile, make_symbol_p_inv};

/// One wave packet measured against the cutoff.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LocalProbe {
    pub t: f64,
    /// `u = tξ0`.
    pub u: f64,
    /// `‖χ p⁻¹(x,tD) f‖`.
    pub q: f64,
    /// `‖χ f‖` in `H^{s+}_t`, `H^{s−}_t` and `L²`.
    pub upper: f64,
    pub lower: f64,
    pub l2: f64,
    /// `‖f‖_{H^{−m1}_t}`.
    pub slack: f64,
}

pub(crate) fn theorem2(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = &cfg.tolerances;
    let l = grid.period;
    let bump = cfg.params.bump.unwrap_or(BumpParams { center: 0.5 * l, radius: l / 8.0 });
    let eps = bump.radius;
    if !(eps > 0.0 && eps <= 0.25 * l) {
        return Err(LabError::Config(format!("bump radius {eps} must lie in (0, L/4]")));
    }
    let sigma = 0.5 * eps;
    let probes = cfg.params.probes.clone().unwrap_or(vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0]);
    let fit_min_u = cfg.params.exponent_fit_min_u.unwrap_or(16.0);
    let m1 = cfg.speed.m1();

    // c_ε^± over the bump interval, and the speed at its center.
    let inside: Vec<f64> =
        (0..grid.n).map(|k| grid.x(k)).filter(|&x| wrapped_offset(x, bump.center, l).abs() < eps).collect();
    let c_sup = inside.iter().map(|&x| cfg.speed.eval(x)).fold(f64::NEG_INFINITY, f64::max);
    let c_inf = inside.iter().map(|&x| cfg.speed.eval(x)).fold(f64::INFINITY, f64::min);
    if !(c_inf - eps > 0.0) {
        return Err(LabError::Config(format!("bump radius {eps} is not below inf c = {c_inf} on the bump")));
    }
    let s_plus = -1.0 / (c_sup + eps);
    let s_minus = -1.0 / (c_inf - eps);
    let c_center = cfg.speed.eval(bump.center);
    let target = -1.0 / c_center;
    rec.value("s_plus", s_plus);
    rec.value("s_minus", s_minus);
    rec.value("target_exponent", target);

    let chi: Vec<f64> = (0..grid.n).map(|k| bump_profile(grid.x(k), bump.center, eps, l)).collect();
    let pinv = make_symbol_p_inv(&cfg.speed, &grid)?;
    let far_center = (bump.center + 0.5 * l).rem_euclid(l);

    let mut probe_table =
        Table::new(&["t", "u", "xi0", "q", "chi_f_s_plus", "chi_f_s_minus", "chi_f_l2", "f_minus_m1"]);
    let mut const_table = Table::new(&["t", "c0", "c1", "c2", "far_q", "far_slack"]);
    let (mut c0s, mut c1s, mut c2s) = (Vec::new(), Vec::new(), Vec::new());
    let (mut fx, mut fy) = (Vec::new(), Vec::new());
    let mut far_worst = 0.0f64;
    for &t in &cfg.t_sweep {
        let p = quantize_semiclassical(&pinv, t, &grid);
        let n = grid.n;
        let comm = QuantizedOperator {
            grid,
            matrix: crate::quantize::CMatrix::from_fn(n, n, |k, j| p.matrix[(k, j)] * (chi[j] - chi[k])),
            mode: QuantizationMode::Semiclassical { t },
            symbol_label: "[p_inv,chi]".into(),
        };
        let c0 = comm.operator_norm(-m1, 0.0, t)? / t;

        let mut rows = Vec::new();
        for &u in &probes {
            let xi0 = u / t;
            if xi0 > grid.xi_max() - 3.0 / sigma {
                continue;
            }
            let f = wave_packet(&grid, xi0, bump.center, sigma);
            let chi_f = f.pointwise(&chi);
            let pf = p.apply(&f)?;
            let probe = LocalProbe {
                t,
                u,
                q: pf.pointwise(&chi).l2_norm(),
                upper: hst_norm(&chi_f, s_plus, t),
                lower: hst_norm(&chi_f, s_minus, t),
                l2: chi_f.l2_norm(),
                slack: hst_norm(&f, -m1, t),
            };
            probe_table.push(vec![
                t.into(),
                u.into(),
                xi0.into(),
                probe.q.into(),
                probe.upper.into(),
                probe.lower.into(),
                probe.l2.into(),
                probe.slack.into(),
            ]);
            if u >= fit_min_u {
                fx.push((1.0 + 4.0 * std::f64::consts::PI.powi(2) * u * u).sqrt().ln());
                fy.push((probe.q / probe.l2).ln());
            }
            rows.push(probe);
        }
        if rows.is_empty() {
            return Err(LabError::Config(format!("no probe frequency fits the grid at t = {t}")));
        }
        // Sharpest constants: C1 ‖χf‖_{s−} − slack ≤ q ≤ C2 ‖χf‖_{s+} + slack at every probe.
        let c2 = rows.iter().map(|r| (r.q - t * c0 * r.slack) / r.upper).fold(f64::NEG_INFINITY, f64::max);
        let c1 = rows.iter().map(|r| (r.q + t * c0 * r.slack) / r.lower).fold(f64::INFINITY, f64::min);

        // A packet opposite the bump: only the slack term can account for it.
        let top = rows.last().map(|r| r.u).unwrap_or(probes[0]);
        let far: GridFunction = wave_packet(&grid, top / t, far_center, sigma);
        let far_q = p.apply(&far)?.pointwise(&chi).l2_norm();
        let far_slack = t * c0 * hst_norm(&far, -m1, t);
        far_worst = far_worst.max(far_q / far_slack);

        rec.log(format!("t = {t}: C0 {c0:.5}, C1 {c1:.5}, C2 {c2:.5}, {} probes", rows.len()));
        const_table.push(vec![t.into(), c0.into(), c1.into(), c2.into(), far_q.into(), far_slack.into()]);
        c0s.push(c0);
        c1s.push(c1);
        c2s.push(c2);
    }
    rec.table("probes.csv", &probe_table)?;
    rec.table("constants.csv", &const_table)?;
    rec.text(
        "plot.gp",
        &gnuplot_loglog(
            "constants vs t",
            &[("constants.csv", 1, 2, "C0"), ("constants.csv", 1, 3, "C1"), ("constants.csv", 1, 4, "C2")],
        ),
    )?;

    if fx.len() < 2 {
        return Err(LabError::Config("fewer than two probes enter the exponent fit".into()));
    }
    let fit = linear_fit(&fx, &fy);
    rec.fit("local_exponent", fit);
    let exponent = fit.slope;
    let rel = (exponent - target).abs() / target.abs();
    rec.value("exponent", exponent);
    rec.value("exponent_rel_error", rel);
    rec.check(
        "exponent",
        rel <= th.exponent_rel_tol,
        rel,
        th.exponent_rel_tol,
        format!("fitted {exponent:.5} against {target:.5} from {} probes", fx.len()),
    );
    rec.check(
        "exponent_in_band",
        exponent >= s_minus && exponent <= s_plus,
        exponent,
        s_plus,
        format!("band [{s_minus:.5}, {s_plus:.5}]"),
    );
    for (name, v) in [("c0", &c0s), ("c1", &c1s), ("c2", &c2s)] {
        let spread = spread_about_median(v);
        rec.value(&format!("{name}_median"), super::median(v));
        rec.value(&format!("{name}_spread"), spread);
        rec.check(
            &format!("{name}_stable"),
            v.iter().all(|x| x.is_finite() && *x > 0.0) && spread <= th.constant_stability,
            spread,
            th.constant_stability,
            format!("max |{name}/median - 1| over the sweep"),
        );
    }
    rec.value("far_ratio", far_worst);
    rec.check("far_probe", far_worst <= 1.0, far_worst, 1.0, "q / (t C0 |f|) for a packet opposite the bump");
    Ok(())
}
