//! A wave packet under a spatial cutoff: how much of it survives p^-1(x,tD).

use semiclass_lab::evolution::wave_packet;
use semiclass_lab::norms::hst_norm;
use semiclass_lab::quantize::quantize_semiclassical;
use semiclass_lab::speed_profiles::{bump_profile, make_symbol_p_inv, SpeedProfile};
use semiclass_lab::GridSpec;

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(1024, 1.0)?;
    let speed = SpeedProfile::plateau(1.1, 0.9, 0.5, 0.25, 0.5, 1.0, 0.85, 1.15);
    let chi: Vec<f64> = grid.x_nodes().iter().map(|&x| bump_profile(x, 0.5, 0.125, 1.0)).collect();
    let t = 0.0625;
    let p = quantize_semiclassical(&make_symbol_p_inv(&speed, &grid)?, t, &grid);
    println!("{:>6} {:>12} {:>12}", "u", "q/|chi f|", "H^(-1/0.9)");
    for u in [4.0, 8.0, 16.0, 24.0] {
        let f = wave_packet(&grid, u / t, 0.5, 0.0625);
        let chi_f = f.pointwise(&chi);
        let q = p.apply(&f)?.pointwise(&chi).l2_norm();
        println!("{u:>6} {:>12.5e} {:>12.5e}", q / chi_f.l2_norm(), hst_norm(&chi_f, -1.0 / 0.9, t) / chi_f.l2_norm());
    }
    Ok(())
}
