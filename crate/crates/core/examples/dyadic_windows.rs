//! Littlewood-Paley pieces of a commutator and their geometric decay in j.

use semiclass_lab::commutators::{dagger_weight, localized_commutator, semicommutator, CommutatorSpec, Window};
use semiclass_lab::fit::geometric_fit;
use semiclass_lab::quantize::CMatrix;
use semiclass_lab::speed_profiles::{check_admissible, make_symbol_d, make_symbol_p_inv, SpeedProfile};
use semiclass_lab::GridSpec;

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(128, 0.0625)?;
    let speed = SpeedProfile::power_sine(1.0, 0.1, 0.0625, 4.5, 0.85, 1.15);
    let report = check_admissible(&speed, &grid)?;
    println!("derivatives resolved: N = {} (need {})", report.n_supported, report.n_required);

    let t = 2f64.powi(-6);
    let d_dag = dagger_weight(&make_symbol_d(&speed, &grid)?, speed.m1());
    let spec = CommutatorSpec::new(make_symbol_p_inv(&speed, &grid)?, d_dag, t);
    let full = semicommutator(&spec, &grid);

    let mut sum = CMatrix::zeros(grid.n, grid.n);
    let (mut js, mut ys) = (Vec::new(), Vec::new());
    let mut j = -1;
    while Window::dyadic(j).is_active(t, &grid) {
        let piece = localized_commutator(&spec.clone().localized(Window::dyadic(j)), &grid)?;
        let y = piece.operator_norm(0.0, 0.0, t)?;
        println!("j = {j:>2}  norm = {y:.4e}");
        sum += &piece.matrix;
        if j >= 0 {
            js.push(j as f64);
            ys.push(y);
        }
        j += 1;
    }
    let fit = geometric_fit(&js, &ys);
    println!("decay rate {:.3} (log2 per window)", -fit.slope);
    println!("|sum - full| / |full| = {:.2e}", (sum - &full.matrix).norm() / full.matrix.norm());
    Ok(())
}
