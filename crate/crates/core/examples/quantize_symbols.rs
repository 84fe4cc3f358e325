//! Canonical and semiclassical quantization of the speed symbols on one grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use semiclass_lab::quantize::{quantize_canonical, quantize_semiclassical, rescaling_check};
use semiclass_lab::speed_profiles::{make_symbol_d, make_symbol_p, make_symbol_p_inv, SpeedProfile};
use semiclass_lab::{GridFunction, GridSpec};

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(128, 1.0)?;
    let speed = SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15);
    let p = make_symbol_p(&speed, &grid)?;
    let pinv = make_symbol_p_inv(&speed, &grid)?;
    let d = make_symbol_d(&speed, &grid)?;

    let f = GridFunction::from_fn(grid, |x| Complex64::from_polar(1.0, 2.0 * PI * 20.0 * x));
    let canon = quantize_canonical(&d, &grid);
    println!("|d(x,D) e_20| = {:.6}  (|f| = {:.6})", canon.apply(&f)?.l2_norm(), f.l2_norm());

    for t in [1.0, 0.25, 0.0625] {
        let a = quantize_semiclassical(&p, t, &grid);
        let b = quantize_semiclassical(&pinv, t, &grid);
        let pf = a.apply(&f)?;
        let back = b.apply(&pf)?;
        println!(
            "t = {t:<7} |p(x,tD) f| = {:>10.4}  |p_inv p f - f| = {:.3e}",
            pf.l2_norm(),
            back.axpy((-1.0).into(), &f).l2_norm()
        );
    }

    // Conjugating by the dilation maps tD on period tL to D on period L.
    let t = 0.125;
    let fine = GridSpec::new(128, t)?;
    println!("rescaling defect at t = {t}: {:.2e}", rescaling_check(&p, t, &fine, &grid)?);
    Ok(())
}
