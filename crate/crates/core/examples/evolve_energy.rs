//! Solve u_t = d_t(x,D) u, write the trajectory, and report growth rates of the weighted energy.

use semiclass_lab::evolution::{gronwall_rate, solve, InitialData, IvpConfig, Stepper};
use semiclass_lab::speed_profiles::SpeedProfile;
use semiclass_lab::GridSpec;

fn main() -> semiclass_lab::Result<()> {
    let mut cfg = IvpConfig {
        grid: GridSpec::new(256, 1.0)?,
        speed: SpeedProfile::cosine(1.0, 0.1, 1.0, 0.85, 1.15),
        t_final: 0.5,
        stepper: Stepper::Rk4,
        theta: 0.1,
        initial_data: InitialData::Gaussian { center: 0.5, width: 0.0625 },
        output_times: IvpConfig::uniform_outputs(0.5, 25),
    };
    let traj = solve(&cfg)?;
    let rates = gronwall_rate(&traj)?;
    println!("max d/dt log E on [0.05, 0.5]: {:.5e}", rates.max_over(0.05, 0.5));

    let path = std::env::temp_dir().join("semiclass_trajectory.csv");
    traj.write_csv(&path)?;
    println!("wrote {}", path.display());

    // For constant speed the closed-form propagator is available.
    cfg.speed = SpeedProfile::constant(0.9, 0.85, 1.15);
    let rk = solve(&cfg)?;
    cfg.stepper = Stepper::ExactConstantC;
    let exact = solve(&cfg)?;
    let err = rk.final_state().axpy((-1.0).into(), exact.final_state()).l2_norm() / exact.final_state().l2_norm();
    println!("constant c = 0.9: RK4 vs exact relative error {err:.2e}");
    Ok(())
}
