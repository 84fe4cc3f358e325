//! The interface symbol p_M applied to a mode, for a sloped interface.

use std::f64::consts::PI;

use num_complex::Complex64;
use semiclass_lab::quantize::quantize_canonical;
use semiclass_lab::speed_profiles::make_symbol_p_m;
use semiclass_lab::{GridFunction, GridSpec};

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(64, 1.0)?;
    let slope = GridFunction::from_real(grid, |x| 0.5 * (2.0 * PI * x).sin());
    let pm = make_symbol_p_m((1.0, 2.0), &slope)?;
    let op = quantize_canonical(&pm, &grid);
    for m in [1, 4, 16] {
        let f = GridFunction::from_fn(grid, |x| Complex64::from_polar(1.0, 2.0 * PI * m as f64 * x));
        println!("mode {m:>2}: |p_M(x,D) f| / |f| = {:.5}", op.apply(&f)?.l2_norm() / f.l2_norm());
    }
    println!("equal densities: {}", make_symbol_p_m((1.0, 1.0), &slope).unwrap_err());
    Ok(())
}
