//! Semiclassical Sobolev norms of a wave packet as t and s vary.

use semiclass_lab::evolution::wave_packet;
use semiclass_lab::norms::{apply_weight, hst_norm};
use semiclass_lab::GridSpec;

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(512, 1.0)?;
    let f = wave_packet(&grid, 64.0, 0.5, 0.05);
    println!("{:>8} {:>12} {:>12} {:>12}", "t", "s = -1", "s = 0", "s = 1");
    for t in [1.0, 0.1, 0.01, 0.0] {
        println!(
            "{t:>8} {:>12.5e} {:>12.5e} {:>12.5e}",
            hst_norm(&f, -1.0, t),
            hst_norm(&f, 0.0, t),
            hst_norm(&f, 1.0, t)
        );
    }
    // The weight is an isometry from H^s_t onto L^2.
    let w = apply_weight(&f, 1.0, 0.1);
    println!("|W f|_L2 = {:.6e}, |f|_H1 = {:.6e}", w.l2_norm(), hst_norm(&f, 1.0, 0.1));
    Ok(())
}
