//! Couple a rendered spring to inertial environments: eigenvalue sweep,
//! search for a destabilizing inertia, and a simulated impulse response.

use elastpass::coupsim::{default_env_grid, eig_sweep, find_destabilizing_env, growth_check, most_unstable, simulate, CoupledEnv, CoupledEnvKind, SimOptions};
use elastpass::models::{ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};

fn main() -> elastpass::Result<()> {
    let grid = default_env_grid();
    for kd in [150.0, 380.0] {
        let case = ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(kd)?)?;
        let map = eig_sweep(&case, CoupledEnvKind::Inertia, &grid)?;
        println!("K_d = {kd}: {}", map.summary());
        if let Some(d) = find_destabilizing_env(&case, CoupledEnvKind::Inertia, &grid)? {
            println!("  first destabilizing inertia {:.3e} kg m^2 (max Re {:.2})", d.value, d.spectral_abscissa);
        }
        if let Some(w) = most_unstable(&map) {
            let g = growth_check(&case, CoupledEnv::inertia(w.value)?, 20.0)?;
            println!("  most unstable at {:.3e}: simulated growth {:.3} vs eigenvalue {:.3}", w.value, g.measured, g.spectral_abscissa);
        }

        let env = CoupledEnv::inertia(0.01)?;
        let sim = simulate(&case, env, 1.0, SimOptions { t_end: 0.5, ..SimOptions::default() })?;
        println!(
            "  impulse into 0.01 kg m^2: lowest energy {:.4} of {:.4} J supplied{}",
            sim.min_energy(),
            sim.impulse_energy(0.01),
            sim.diverged_at.map(|t| format!(", diverged at {t:.3} s")).unwrap_or_default()
        );
    }
    Ok(())
}
