//! Norm of the semicommutator of p^-1 and d against t, with a power-law fit.

use semiclass_lab::commutators::{semicommutator, CommutatorSpec};
use semiclass_lab::fit::power_law_fit;
use semiclass_lab::speed_profiles::{make_symbol_d, make_symbol_p_inv, SpeedProfile};
use semiclass_lab::GridSpec;

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(128, 0.125)?;
    let speed = SpeedProfile::cosine(1.0, 0.1, 8.0, 0.85, 1.15);
    let (pinv, d) = (make_symbol_p_inv(&speed, &grid)?, make_symbol_d(&speed, &grid)?);
    let m1 = speed.m1();

    let ts: Vec<f64> = (3..=8).rev().map(|k| 2f64.powi(-k)).collect();
    let mut norms = Vec::new();
    for &t in &ts {
        let c = semicommutator(&CommutatorSpec::new(pinv.clone(), d.clone(), t), &grid);
        let n = c.operator_norm(-m1, 0.0, t)?;
        println!("t = {t:<10} norm = {n:.5e}  norm/t = {:.4}", n / t);
        norms.push(n);
    }
    let fit = power_law_fit(&ts, &norms);
    println!("slope {:.4}, R^2 {:.5}", fit.slope, fit.r2);
    Ok(())
}
