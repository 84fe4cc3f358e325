//! Reference values computed independently of the library routines they check.

use std::f64::consts::PI;

use num_complex::Complex64;
use semiclass_lab::commutators::{
    commutator_with_multiplier, dagger_weight, diagonal_synthesis, duality_bound_check, duality_constant, localized_commutator, semicommutator,
    CommutatorSpec, Window,
};
use semiclass_lab::evolution::{
    energy, exact_constant_c, gronwall_rate, solve, InitialData, IvpConfig, Stepper, Trajectory,
};
use semiclass_lab::grid::{forward_transform, GridFunction, GridSpec};
use semiclass_lab::norms::hst_norm;
use semiclass_lab::quantize::{
    power_iteration, quantize_canonical, quantize_semiclassical, rescaling_check, NormMethod, QuantizedOperator,
};
use semiclass_lab::speed_profiles::{
    check_admissible, decompose_pi_sigma, make_symbol_d, make_symbol_p, make_symbol_p_inv, make_weight, SpeedProfile, Symbol, SymbolKind, SymbolLabel,
};
use semiclass_lab::LabError;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn cosine_speed() -> SpeedProfile {
    SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15)
}

/// `f̂(m/L) = Δx Σ_k f(x_k) e^{−2πi k m/n}` by direct summation.
fn naive_transform(f: &GridFunction, m: i64) -> Complex64 {
    let n = f.grid.n;
    let s: Complex64 = (0..n)
        .map(|k| f.values[k] * Complex64::from_polar(1.0, -2.0 * PI * (k as i64 * m) as f64 / n as f64))
        .sum();
    s * f.grid.dx()
}

/// `a(x,tD) f (x_k)` from the defining sum, without FFTs.
fn naive_apply(a: &Symbol, t: f64, f: &GridFunction) -> GridFunction {
    let g = f.grid;
    let n = g.n as i64;
    let fh: Vec<Complex64> = (-n / 2..n / 2).map(|m| naive_transform(f, m)).collect();
    GridFunction::from_fn(g, |x| {
        let s: Complex64 = (-n / 2..n / 2)
            .zip(&fh)
            .map(|(m, c)| {
                let xi = m as f64 / g.period;
                a.eval(x, t * xi) * c * Complex64::from_polar(1.0, 2.0 * PI * x * xi)
            })
            .sum();
        s * g.dxi()
    })
}

fn rel(a: &GridFunction, b: &GridFunction) -> f64 {
    a.axpy(c(-1.0), b).l2_norm() / b.l2_norm()
}

#[test]
fn quantization_matches_defining_sum() {
    let g = GridSpec::new(32, 2.0).unwrap();
    let p = make_symbol_p(&cosine_speed(), &g).unwrap();
    let f = GridFunction::from_fn(g, |x| Complex64::new((PI * x).sin(), (-(x - 1.0) * (x - 1.0)).exp()));
    for t in [1.0, 0.25] {
        let op = quantize_semiclassical(&p, t, &g);
        assert!(rel(&op.apply(&f).unwrap(), &naive_apply(&p, t, &f)) < 1e-12);
    }
    let can = quantize_canonical(&p, &g);
    assert!(rel(&can.apply(&f).unwrap(), &naive_apply(&p, 1.0, &f)) < 1e-12);
}

#[test]
fn transform_matches_direct_sum() {
    let g = GridSpec::new(64, 3.0).unwrap();
    let f = GridFunction::from_fn(g, |x| Complex64::new(x.cos(), (2.0 * x).sin() * x));
    let fh = forward_transform(&f);
    for m in [-32, -5, 0, 7, 31] {
        assert!((fh.coeff(m) - naive_transform(&f, m)).norm() < 1e-12);
    }
}

#[test]
fn multiplier_norm_is_weighted_sup() {
    let g = GridSpec::new(64, 1.0).unwrap();
    let a = Symbol::multiplier(1.0, SymbolLabel::Custom("abs".into()), |xi| c(xi.abs()));
    let (s_from, s_to, t) = (1.5, 0.25, 0.125);
    let op = quantize_semiclassical(&a, t, &g);
    let w = |s: f64, xi: f64| (1.0 + 4.0 * PI * PI * t * t * xi * xi).powf(0.5 * s);
    let want = g.freq_nodes().iter().map(|&xi| (t * xi).abs() * w(s_to, xi) / w(s_from, xi)).fold(0.0, f64::max);
    let got = op.operator_norm(s_from, s_to, t).unwrap();
    assert!((got - want).abs() < 1e-12 * want, "{got} {want}");
    let power = op.operator_norm_with(s_from, s_to, t, NormMethod::Power).unwrap();
    assert!((power - want).abs() < 1e-6 * want);
}

#[test]
fn power_iteration_agrees_with_svd() {
    let g = GridSpec::new(64, 1.0).unwrap();
    let op = semicommutator(
        &CommutatorSpec::new(make_symbol_p_inv(&cosine_speed(), &g).unwrap(), make_symbol_d(&cosine_speed(), &g).unwrap(), 0.125),
        &g,
    );
    let svd = op.operator_norm_with(-1.0, 0.0, 0.125, NormMethod::Svd).unwrap();
    let pw = power_iteration(&op.weighted_fourier_matrix(-1.0, 0.0, 0.125), 1e-12, 100_000).unwrap();
    assert!((svd - pw.sigma).abs() < 1e-6 * svd);
}

#[test]
fn single_mode_amplification() {
    // c = 1, t = 1, ξ = 2: (1 + 2)^1 = 3.
    let g = GridSpec::new(32, 1.0).unwrap();
    let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * 2.0 * x));
    let out = exact_constant_c(&f, 1.0, 1.0).unwrap();
    for (o, v) in out.values.iter().zip(&f.values) {
        assert!((o - 3.0 * v).norm() < 1e-12);
    }
    assert_eq!(exact_constant_c(&f, 1.0, 0.0).unwrap().l2_norm(), f.l2_norm());
}

fn gaussian_ivp(c0: f64, stepper: Stepper) -> IvpConfig {
    IvpConfig {
        grid: GridSpec::new(256, 16.0).unwrap(),
        speed: SpeedProfile::constant(c0, 0.85, 1.15),
        t_final: 1.0,
        stepper,
        theta: 0.1,
        initial_data: InitialData::Gaussian { center: 8.0, width: 1.0 },
        output_times: IvpConfig::uniform_outputs(1.0, 10),
    }
}

#[test]
fn rk4_matches_exact_propagator() {
    // c = 1 makes each mode linear in t, which RK4 integrates exactly; c = 0.9 and 1.1 do not.
    for c0 in [1.0, 0.9, 1.1] {
        let rk = solve(&gaussian_ivp(c0, Stepper::Rk4)).unwrap();
        let ex = solve(&gaussian_ivp(c0, Stepper::ExactConstantC)).unwrap();
        let err = rel(rk.final_state(), ex.final_state());
        assert!(err <= 1e-6, "c = {c0}: {err}");
    }
}

#[test]
fn exact_trajectory_conserves_energy() {
    let ex = solve(&gaussian_ivp(0.9, Stepper::ExactConstantC)).unwrap();
    let e0 = ex.states[0].l2_norm().powi(2);
    for (t, e) in ex.times.iter().zip(&ex.energies).skip(1) {
        assert!(*t >= 0.1);
        assert!((e.unwrap() - e0).abs() <= 1e-10 * e0);
    }
    let rates = gronwall_rate(&ex).unwrap();
    assert!(rates.rates.iter().all(|r| r.abs() < 1e-6));
}

#[test]
fn energy_two_ways_for_constant_speed() {
    let g = GridSpec::new(64, 2.0).unwrap();
    let speed = SpeedProfile::constant(0.95, 0.85, 1.15);
    let f = GridFunction::from_real(g, |x| (-4.0 * (x - 1.0).powi(2)).exp() * (5.0 * x).cos());
    let t = 0.3;
    let via_matrix = quantize_semiclassical(&make_symbol_p_inv(&speed, &g).unwrap(), t, &g).apply(&f).unwrap();
    let fh = forward_transform(&f);
    let via_multiplier: f64 = g
        .freq_nodes()
        .iter()
        .zip(&fh.coeffs)
        .map(|(xi, v)| (1.0 + 0.95 * t * xi.abs()).powf(-2.0 / 0.95) * v.norm_sqr())
        .sum::<f64>()
        * g.dxi();
    let e = energy(&f, &speed, t).unwrap();
    assert!((e - via_multiplier).abs() < 1e-10 * e);
    assert!((via_matrix.l2_norm().powi(2) - e).abs() < 1e-10 * e);
    assert_eq!(energy(&GridFunction::zeros(g), &speed, t).unwrap(), 0.0);
}

#[test]
fn energy_converges_under_refinement() {
    let speed = cosine_speed();
    let f = |n| {
        let g = GridSpec::new(n, 1.0).unwrap();
        let f = GridFunction::from_real(g, |x| (-PI * ((x - 0.5) / 0.1).powi(2)).exp());
        energy(&f, &speed, 0.25).unwrap()
    };
    let (a, b) = (f(128), f(256));
    assert!(a > 0.0 && a.is_finite());
    assert!((a - b).abs() < 1e-3 * b);
}

#[test]
fn rates_unchanged_by_scaling_data() {
    let mut ivp = gaussian_ivp(1.0, Stepper::Rk4);
    ivp.grid = GridSpec::new(64, 1.0).unwrap();
    ivp.speed = cosine_speed();
    ivp.initial_data = InitialData::Gaussian { center: 0.5, width: 0.1 };
    let a = solve(&ivp).unwrap();
    let scaled = Trajectory {
        times: a.times.clone(),
        states: a.states.iter().map(|s| s.scale(c(2.0))).collect(),
        energies: a.energies.iter().map(|e| e.map(|v| 4.0 * v)).collect(),
    };
    let (ra, rb) = (gronwall_rate(&a).unwrap(), gronwall_rate(&scaled).unwrap());
    for (x, y) in ra.rates.iter().zip(&rb.rates) {
        assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
    }
}

#[test]
fn per_mode_growth_and_monotone_loss() {
    let g = GridSpec::new(64, 4.0).unwrap();
    for m in [1i64, 5, 31] {
        let xi = m as f64 / 4.0;
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * xi * x));
        for c0 in [0.9, 1.1] {
            let out = exact_constant_c(&f, c0, 1.0).unwrap();
            let ratio = out.l2_norm() / f.l2_norm();
            assert!((ratio - (1.0 + c0 * xi).powf(1.0 / c0)).abs() < 1e-12 * ratio);
        }
    }
    let top = g.xi_max() - g.dxi();
    let amp = |c0: f64| (1.0 + c0 * top).powf(1.0 / c0);
    assert!(amp(0.9) > amp(1.1));
}

#[test]
fn factorization_through_semicommutator() {
    let g = GridSpec::new(64, 1.0).unwrap();
    let (p, pinv) = (make_symbol_p(&cosine_speed(), &g).unwrap(), make_symbol_p_inv(&cosine_speed(), &g).unwrap());
    let t = 0.125;
    let lhs = &quantize_semiclassical(&p, t, &g).matrix * &quantize_semiclassical(&pinv, t, &g).matrix;
    let cm = semicommutator(&CommutatorSpec::new(p, pinv, t), &g);
    let rhs = &cm.matrix + semiclass_lab::quantize::CMatrix::identity(64, 64);
    assert!((lhs - rhs).camax() < 1e-10);
}

#[test]
fn localized_kernel_route_matches_direct_difference() {
    let g = GridSpec::new(64, 1.0).unwrap();
    let spec = CommutatorSpec::new(
        make_symbol_p_inv(&cosine_speed(), &g).unwrap(),
        dagger_weight(&make_symbol_d(&cosine_speed(), &g).unwrap(), 1.0 / 0.85),
        0.0625,
    );
    let ones = Window {
        symbol: Symbol::multiplier(0.0, SymbolLabel::Custom("one".into()), |_| c(1.0)),
        support: (0.0, f64::INFINITY),
        index: None,
    };
    let loc = localized_commutator(&spec.clone().localized(ones), &g).unwrap();
    let full = semicommutator(&spec, &g);
    let diff = QuantizedOperator { matrix: &loc.matrix - &full.matrix, ..full.clone() };
    assert!(diff.operator_norm(0.0, 0.0, 0.0625).unwrap() < 1e-8 * full.operator_norm(0.0, 0.0, 0.0625).unwrap());

    let zero = Window {
        symbol: Symbol::multiplier(0.0, SymbolLabel::Custom("zero".into()), |_| c(0.0)),
        support: (0.0, 0.0),
        index: None,
    };
    assert_eq!(localized_commutator(&spec.clone().localized(zero), &g).unwrap().matrix.camax(), 0.0);

    let mult = CommutatorSpec::new(spec.p1.clone(), make_weight(-0.5), 0.0625).localized(Window::dyadic(-1));
    assert!(localized_commutator(&mult, &g).unwrap().matrix.camax() < 1e-12);
}

#[test]
fn dagger_weight_properties() {
    let g = GridSpec::new(32, 1.0).unwrap();
    let d = make_symbol_d(&cosine_speed(), &g).unwrap();
    let same = dagger_weight(&d, 0.0);
    assert_eq!(same.eval(0.3, 2.0), d.eval(0.3, 2.0));
    let dd = dagger_weight(&d, 1.0 / 0.85);
    assert_eq!(dd.eval(0.7, 0.0), c(0.0));
    assert!((dd.order - 1.0 / 0.85).abs() < 1e-15);
}

#[test]
fn diagonal_synthesis_inverts_transform() {
    let g = GridSpec::new(64, 2.0).unwrap();
    let f = GridFunction::from_fn(g, |x| Complex64::new((PI * x).sin(), 0.3 * (3.0 * PI * x).cos()));
    let fh = forward_transform(&f);
    let q = semiclass_lab::quantize::CMatrix::from_fn(64, 64, |_, j| fh.coeffs[j]);
    let back = diagonal_synthesis(&q, &g);
    assert!(rel(&back, &f) < 1e-12);
    let chk = duality_bound_check(&q, &g);
    assert!((chk.lhs - f.l2_norm()).abs() < 1e-12);
    assert!(chk.holds());
    let zero = duality_bound_check(&semiclass_lab::quantize::CMatrix::zeros(64, 64), &g);
    assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
}

#[test]
fn duality_constant_closed_form() {
    // Σ_{m∈Z} Δξ/(1 + 4π²(m/L)²) = coth(L/2)/2; subtract the frequencies the grid omits.
    let tail_sum = |from: i64, l: f64| {
        let m_max = 1_000_000i64;
        let direct: f64 = (from..=m_max).map(|m| 1.0 / (1.0 + 4.0 * PI * PI * (m as f64 / l).powi(2))).sum();
        direct + l * l / (4.0 * PI * PI * m_max as f64)
    };
    for (n, l) in [(64usize, 1.0f64), (1024, 8.0)] {
        let g = GridSpec::new(n, l).unwrap();
        let full = 0.5 / (0.5 * l).tanh();
        let missing = (tail_sum(n as i64 / 2, l) + tail_sum(n as i64 / 2 + 1, l)) / l;
        let want = (full - missing).sqrt();
        assert!((duality_constant(&g) - want).abs() < 1e-9, "{} {want}", duality_constant(&g));
    }
    let wide = duality_constant(&GridSpec::new(4096, 64.0).unwrap());
    assert!((wide - 0.5f64.sqrt()).abs() < 1e-2);
}

#[test]
fn rescaling_is_exact() {
    let coarse = GridSpec::new(64, 1.0).unwrap();
    let t = 0.125;
    let fine = GridSpec::new(64, t).unwrap();
    let p = make_symbol_p(&cosine_speed(), &coarse).unwrap();
    assert!(rescaling_check(&p, t, &fine, &coarse).unwrap() < 1e-10);
}

#[test]
fn sobolev_weight_of_mode() {
    let g = GridSpec::new(64, 2.0).unwrap();
    let xi = 3.0 / 2.0;
    let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * xi * x));
    let (s, t) = (-1.0 / 0.85, 0.25);
    let want = (1.0 + (2.0 * PI * t * xi).powi(2)).powf(s / 2.0) * f.l2_norm();
    assert!((hst_norm(&f, s, t) - want).abs() < 1e-13);
}

#[test]
fn admissibility_gate() {
    let g = GridSpec::new(256, 1.0).unwrap();
    let ok = check_admissible(&cosine_speed(), &g).unwrap();
    assert_eq!(ok.n_required, 3);
    assert!(ok.n_supported >= 3);
    let dips = SpeedProfile::cosine(1.0, 0.2, 1.0, 0.85, 1.15);
    let err = check_admissible(&dips, &g).unwrap_err();
    assert!(matches!(err, LabError::Admissibility(_)));
    assert_eq!(err.exit_code(), 3);
    let rough = SpeedProfile::power_sine(1.0, 0.1, 0.0625, 4.5, 0.85, 1.15);
    let fine = GridSpec::new(256, 0.0625).unwrap();
    assert_eq!(check_admissible(&rough, &fine).unwrap().n_supported, 4);
}

#[test]
fn export_import_round_trip() {
    let g = GridSpec::new(16, 1.0).unwrap();
    let op = quantize_semiclassical(&make_symbol_p_inv(&cosine_speed(), &g).unwrap(), 0.5, &g);
    let dir = std::env::temp_dir().join(format!("semiclass-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p_inv.bin");
    op.export(&path).unwrap();
    let back = QuantizedOperator::import(&path).unwrap();
    assert_eq!(back.matrix, op.matrix);
    assert_eq!(back.mode, op.mode);
    assert_eq!(back.symbol_label, op.symbol_label);
    std::fs::write(&path, [0u8; 7]).unwrap();
    assert!(matches!(QuantizedOperator::import(&path), Err(LabError::Shape { .. })));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn flow_is_linear() {
    let mut ivp = gaussian_ivp(1.0, Stepper::Rk4);
    ivp.grid = GridSpec::new(64, 1.0).unwrap();
    ivp.speed = cosine_speed();
    ivp.t_final = 0.5;
    ivp.output_times = vec![0.25, 0.5];
    let run = |data: InitialData| {
        let mut cfg = ivp.clone();
        cfg.initial_data = data;
        solve(&cfg).unwrap().final_state().clone()
    };
    let a = run(InitialData::Noise { seed: 3, band: 12 });
    let b = run(InitialData::Mode { m: 5 });
    let f = InitialData::Noise { seed: 3, band: 12 }.sample(&ivp.grid).unwrap();
    let h = InitialData::Mode { m: 5 }.sample(&ivp.grid).unwrap();
    let combo = f.axpy(Complex64::new(-2.0, 0.5), &h);
    let mut cfg = ivp.clone();
    cfg.initial_data = InitialData::Samples { values: combo.values.iter().map(|v| v.re).collect() };
    let re = solve(&cfg).unwrap().final_state().clone();
    cfg.initial_data = InitialData::Samples { values: combo.values.iter().map(|v| v.im).collect() };
    let im = solve(&cfg).unwrap().final_state().clone();
    let via_parts = re.axpy(Complex64::new(0.0, 1.0), &im);
    let via_superposition = a.axpy(Complex64::new(-2.0, 0.5), &b);
    assert!(rel(&via_parts, &via_superposition) < 1e-8);
}

#[test]
fn multiplier_commutator_matches_kernel_formula() {
    let g = GridSpec::new(32, 1.0).unwrap();
    let pinv = make_symbol_p_inv(&cosine_speed(), &g).unwrap();
    let chi: Vec<f64> = (0..32).map(|k| (2.0 * PI * g.x(k)).sin().powi(2)).collect();
    let t = 0.25;
    let got = commutator_with_multiplier(&pinv, t, &chi, &g);
    let a = quantize_semiclassical(&pinv, t, &g);
    let m = QuantizedOperator::multiplication(&g, &chi, "chi");
    let want = a.compose(&m).unwrap().sub(&m.compose(&a).unwrap()).unwrap();
    assert!((got.matrix - want.matrix).camax() < 1e-13);
}

#[test]
fn frozen_coefficient_split() {
    let g = GridSpec::new(32, 1.0).unwrap();
    let (pi, sigma) = decompose_pi_sigma(SymbolKind::P, &cosine_speed(), &g).unwrap();
    let p = make_symbol_p(&cosine_speed(), &g).unwrap();
    for (x, xi) in [(0.1, 3.0), (0.25, -40.0), (0.9, 0.0)] {
        assert!((pi.eval(x, xi) + sigma.eval(x, xi) - p.eval(x, xi)).norm() < 1e-12 * p.eval(x, xi).norm());
    }
    let frozen = SpeedProfile::constant(1.0, 0.85, 1.15);
    let (pi0, _) = decompose_pi_sigma(SymbolKind::PInv, &frozen, &g).unwrap();
    assert_eq!(pi0.eval(0.3, 17.0), c(0.0));
}
