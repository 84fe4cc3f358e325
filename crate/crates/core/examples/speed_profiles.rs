//! Build speed profiles, check admissibility, and estimate symbol seminorms.

use semiclass_lab::speed_profiles::{check_admissible, make_symbol_p, seminorm_m, SpeedProfile};
use semiclass_lab::GridSpec;

fn main() -> semiclass_lab::Result<()> {
    let grid = GridSpec::new(128, 1.0)?;
    let profiles = [
        ("constant", SpeedProfile::constant(1.0, 0.85, 1.15)),
        ("cosine", SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15)),
        ("plateau", SpeedProfile::plateau(1.1, 0.9, 0.5, 0.25, 0.5, 1.0, 0.85, 1.15)),
        ("gaussian", SpeedProfile::gaussian(1.0, -0.1, 0.5, 0.1, Some(1.0), 0.85, 1.15)),
        ("too wide", SpeedProfile::cosine(1.0, 0.2, 1.0, 0.85, 1.15)),
    ];
    for (name, c) in &profiles {
        match check_admissible(c, &grid) {
            Ok(r) => println!(
                "{name:<9} c in [{:.3}, {:.3}], N resolved {} of {} needed, verdict {:?}",
                r.c_min, r.c_max, r.n_supported, r.n_required, r.verdict
            ),
            Err(e) => println!("{name:<9} rejected: {e}"),
        }
    }

    let c = &profiles[1].1;
    let p = make_symbol_p(c, &grid)?;
    for t in [1.0, 0.5, 0.25] {
        let est = seminorm_m(&p.rescaled_freq(t), 1, 1, c.m1(), &grid)?;
        println!("M_(1,1) of p(x, {t} xi): {:.5} (converged: {})", est.value, est.converged);
    }
    Ok(())
}
