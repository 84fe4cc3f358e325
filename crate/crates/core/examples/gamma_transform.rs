//! The Gamma transform preserves norms, and the diagonal synthesis obeys the duality bound.

use semiclass_lab::commutators::{
    default_gamma, duality_bound_check, gamma_transform, periodized_samples, two_variable_norm, GammaSign,
};
use semiclass_lab::evolution::band_limited_noise;
use semiclass_lab::quantize::CMatrix;
use semiclass_lab::GridSpec;

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(64, 1.0)?;
    let f = band_limited_noise(&grid, 7, 16);
    let samples = periodized_samples(&default_gamma, &grid);
    let gamma_norm = (grid.dx() * samples.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
    for sign in [GammaSign::Plus, GammaSign::Minus] {
        let q = gamma_transform(&f, &default_gamma, sign);
        println!("{sign:?}: |Q| = {:.12}, |gamma| |f| = {:.12}", two_variable_norm(&q, &grid), gamma_norm * f.l2_norm());
    }

    let g = band_limited_noise(&grid, 8, 8);
    let q = CMatrix::from_fn(grid.n, grid.n, |k, j| g.values[k] * f.values[j]);
    let chk = duality_bound_check(&q, &grid);
    println!("|A_Q| = {:.5e} <= C |(1 - d_x) Q| = {:.5e} (C = {:.4})", chk.lhs, chk.constant * chk.rhs, chk.constant);
    Ok(())
}
