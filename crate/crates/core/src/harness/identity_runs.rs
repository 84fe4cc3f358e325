use std::f64::consts::PI;

use num_complex::Complex64;

use super::output::{gnuplot_loglog, Table};
use super::{ExperimentConfig, Recorder};
use crate::commutators::{
    default_gamma, duality_bound_check, gamma_transform_sampled, periodized_samples, semicommutator,
    spectral_derivative_samples, spectral_row_derivative, two_variable_norm, CommutatorSpec, GammaSign,
};
use crate::error::Result;
use crate::evolution::band_limited_noise;
use crate::grid::GridSpec;
use crate::quantize::{quantize_semiclassical, CMatrix, QuantizedOperator};
use crate::speed_profiles::{
    chi0, dyadic_window, make_symbol_p, make_symbol_p_inv, make_weight, seminorm_m, Symbol, SymbolLabel,
};

fn sample_norm(s: &[Complex64], grid: &GridSpec) -> f64 {
    (grid.dx() * s.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

struct Identity<'a> {
    table: Table,
    rec: &'a mut Recorder,
}

impl Identity<'_> {
    fn record(&mut self, name: &str, measured: f64, tol: f64) {
        let ok = measured <= tol;
        self.table.push(vec![name.into(), measured.into(), tol.into(), ok.into()]);
        self.rec.value(name, measured);
        self.rec.check(name, ok, measured, tol, "");
    }
}

/// Plancherel defect of the `Γ` transform for one window sampling.
fn gamma_defect(samples: &[Complex64], grid: &GridSpec, seeds: &[u64]) -> f64 {
    let gn = sample_norm(samples, grid);
    let mut worst = 0.0f64;
    for &seed in seeds {
        let f = band_limited_noise(grid, seed, grid.n / 4);
        for sign in [GammaSign::Plus, GammaSign::Minus] {
            let q = gamma_transform_sampled(&f, samples, sign);
            let rhs = gn * f.l2_norm();
            worst = worst.max((two_variable_norm(&q, grid) - rhs).abs() / rhs);
        }
    }
    worst
}

/// Defect of `‖∂_y Γ‖ = ‖γ'‖ ‖f‖` with spectral differentiation.
fn gamma_derivative_defect(samples: &[Complex64], grid: &GridSpec, seeds: &[u64]) -> f64 {
    let dg = spectral_derivative_samples(samples, grid);
    let gn = sample_norm(&dg, grid);
    let mut worst = 0.0f64;
    for &seed in seeds {
        let f = band_limited_noise(grid, seed, grid.n / 4);
        for sign in [GammaSign::Plus, GammaSign::Minus] {
            let q = spectral_row_derivative(&gamma_transform_sampled(&f, samples, sign), grid);
            let rhs = gn * f.l2_norm();
            worst = worst.max((two_variable_norm(&q, grid) - rhs).abs() / rhs);
        }
    }
    worst
}

pub(crate) fn gamma_identity(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = cfg.tolerances.clone();
    let t = cfg.params.t.unwrap_or(0.25);
    let l = grid.period;
    let mut id = Identity { table: Table::new(&["identity", "measured", "tolerance", "passed"]), rec };

    let samples = periodized_samples(&default_gamma, &grid);
    id.record("gamma_plancherel", gamma_defect(&samples, &grid, &cfg.seeds), th.gamma_tol);
    let sigma = l / 8.0;
    let smooth = periodized_samples(&|w: f64| Complex64::new((-PI * (w / sigma).powi(2)).exp(), 0.0), &grid);
    id.record("gamma_derivative", gamma_derivative_defect(&smooth, &grid, &cfg.seeds), th.gamma_derivative_tol);

    let p = make_symbol_p(&cfg.speed, &grid)?;
    let pinv = make_symbol_p_inv(&cfg.speed, &grid)?;
    let m1 = cfg.speed.m1();
    let vanish_w = semicommutator(&CommutatorSpec::new(pinv.clone(), make_weight(-m1), t), &grid).operator_norm(0.0, 0.0, t)?;
    let one = Symbol::multiplier(0.0, SymbolLabel::Custom("one".into()), |_| Complex64::new(1.0, 0.0));
    let vanish_1 = semicommutator(&CommutatorSpec::new(one, pinv.clone(), t), &grid).operator_norm(0.0, 0.0, t)?;
    id.record("multiplier_commutator", vanish_w.max(vanish_1), th.vanishing_tol);

    // Partition up to the first J with 2^J ≥ tξ_max; the sum is 1 on |ξ| ≤ 2^J.
    let top = (t * grid.xi_max()).log2().ceil().max(0.0) as i32;
    let partition = grid
        .freq_nodes()
        .iter()
        .map(|&xi| {
            let s: f64 = (-1..=top).map(|j| dyadic_window(j, t * xi)).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let telescoped = (0..=200)
        .map(|i| {
            let xi = 2f64.powi(top) * (i as f64 / 100.0 - 1.0);
            let s: f64 = (-1..=top).map(|j| dyadic_window(j, xi)).sum();
            (s - chi0(xi / 2f64.powi(top + 1))).abs()
        })
        .fold(0.0, f64::max);
    id.record("dyadic_partition", partition.max(telescoped), th.partition_tol);

    let mut product = 0.0f64;
    for k in 0..grid.n {
        for xi in grid.freq_nodes() {
            let x = grid.x(k);
            product = product.max((p.eval(x, t * xi) * pinv.eval(x, t * xi) - 1.0).norm());
        }
    }
    id.record("symbol_product", product, th.product_tol);

    let pm = quantize_semiclassical(&p, t, &grid);
    let pim = quantize_semiclassical(&pinv, t, &grid);
    let pp = &pm.matrix * &pim.matrix;
    let c = semicommutator(&CommutatorSpec::new(p.clone(), pinv.clone(), t), &grid);
    let lhs = CMatrix::identity(grid.n, grid.n) + &c.matrix;
    let diff = QuantizedOperator { matrix: lhs - &pp, ..c.clone() }.operator_norm(0.0, 0.0, t)?;
    let scale = QuantizedOperator { matrix: pp, ..c }.operator_norm(0.0, 0.0, t)?.max(1.0);
    id.record("commutator_factorization", diff / scale, th.identity_tol);

    // Random separable arrays Q(x, ξ) = g(x) s(ξ) against the duality bound.
    let mut ratio = 0.0f64;
    for &seed in &cfg.seeds {
        for r in 0..8u64 {
            let g = band_limited_noise(&grid, seed.wrapping_mul(1000).wrapping_add(r), grid.n / 8);
            let h = band_limited_noise(&grid, seed.wrapping_mul(1000).wrapping_add(500 + r), grid.n / 4);
            let xi = grid.freq_nodes();
            let q = CMatrix::from_fn(grid.n, grid.n, |k, j| g.values[k] * h.values[j] * chi0(xi[j] / grid.xi_max()));
            let chk = duality_bound_check(&q, &grid);
            if chk.rhs > 0.0 {
                ratio = ratio.max(chk.lhs / (chk.constant * chk.rhs));
            }
        }
    }
    id.rec.value("duality_ratio", ratio);
    id.table.push(vec!["duality_ratio".into(), ratio.into(), 1.0.into(), (ratio <= 1.0 + 1e-12).into()]);
    id.rec.check("duality_bound", ratio <= 1.0 + 1e-12, ratio, 1.0, "lhs / (C rhs) over separable arrays");

    let Identity { table, rec } = id;
    rec.table("identities.csv", &table)
}

pub(crate) fn seminorm_scaling(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid_spec()?;
    let th = &cfg.tolerances;
    let m1 = cfg.speed.m1();
    let p = make_symbol_p(&cfg.speed, &grid)?;
    let indices = cfg.params.seminorm_indices.clone().unwrap_or(vec![(0, 0), (1, 1), (2, 2)]);
    let mut table = Table::new(&["j", "k", "t", "value", "refined_value", "converged"]);
    let mut worst = f64::NEG_INFINITY;
    for &(j, k) in &indices {
        let mut vals = Vec::new();
        for &t in &cfg.t_sweep {
            let est = seminorm_m(&p.rescaled_freq(t), j, k, m1, &grid)?;
            table.push(vec![
                j.into(),
                k.into(),
                t.into(),
                est.value.into(),
                est.refined_value.unwrap_or(f64::NAN).into(),
                est.converged.into(),
            ]);
            vals.push(est.value);
        }
        // t_sweep increases, so each value must not exceed the next by more than the tolerance.
        let excess = vals.windows(2).map(|w| w[0] / w[1] - 1.0).fold(f64::NEG_INFINITY, f64::max);
        rec.value(&format!("excess_{j}_{k}"), excess);
        worst = worst.max(excess);
    }
    rec.table("seminorms.csv", &table)?;
    rec.text("plot.gp", &gnuplot_loglog("M seminorms of p(x, t.)", &[("seminorms.csv", 3, 4, "all (j, k)")]))?;
    rec.value("max_excess", worst);
    rec.check(
        "monotone_in_t",
        worst <= th.seminorm_tol,
        worst,
        th.seminorm_tol,
        "largest relative increase as t decreases",
    );
    Ok(())
}
